#include "parkcrit/law_io.hpp"

#include "parkcrit/error.hpp"

#include <cmath>
#include <fstream>

namespace parkcrit {

using nlohmann::json;

namespace {

Error bad(const std::string& what) { return Error(ErrorCode::InvalidInput, "law file: " + what); }

Rational exact_value(const json& v, const std::string& field) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    // dump() prints the shortest decimal that reads back to the same double,
    // which is what the author typed for ordinary inputs like 0.05.
    if (v.is_number()) return parse_rational(v.dump());
    throw bad(field + " must be a number or a rational string");
}

double real_value(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_rational(v.get<std::string>()).get_d();
    throw bad(field + " must be a number or a rational string");
}

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw bad(std::string("missing \"") + key + "\"");
    return *it;
}

void allow_only(const json& obj, std::initializer_list<const char*> keys) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* k : keys) known = known || key == k;
        if (!known) throw bad("unexpected key \"" + key + "\"");
    }
}

} // namespace

ArrivalLaw law_from_json(const json& doc) {
    if (!doc.is_object()) throw bad("top level must be an object");
    if (doc.contains("finite")) {
        allow_only(doc, {"finite"});
        const json& entries = doc.at("finite");
        if (!entries.is_array() || entries.empty()) throw bad("\"finite\" must be a non-empty array");
        std::vector<Rational> probs;
        for (const auto& e : entries) probs.push_back(exact_value(e, "finite entry"));
        return ArrivalLaw::finite(std::move(probs));
    }
    if (doc.contains("family")) {
        allow_only(doc, {"family"});
        const json& fam = doc.at("family");
        if (!fam.is_object()) throw bad("\"family\" must be an object");
        const json& name_field = require(fam, "name");
        if (!name_field.is_string()) throw bad("family name must be a string");
        const std::string name = name_field.get<std::string>();
        if (name == "binary0k") {
            allow_only(fam, {"name", "alpha", "k"});
            const json& k = require(fam, "k");
            if (!k.is_number_integer()) throw bad("k must be an integer");
            return ArrivalLaw::binary0k(exact_value(require(fam, "alpha"), "alpha"), k.get<int>());
        }
        if (name == "poisson" || name == "geometric") {
            allow_only(fam, {"name", "alpha"});
            const double alpha = real_value(require(fam, "alpha"), "alpha");
            return name == "poisson" ? ArrivalLaw::poisson(alpha) : ArrivalLaw::geometric(alpha);
        }
        if (name == "nongeneric_example") {
            allow_only(fam, {"name", "mix"});
            const double mix = fam.contains("mix") ? real_value(fam.at("mix"), "mix") : 1.0;
            return ArrivalLaw::nongeneric_example(mix);
        }
        throw bad("unknown family \"" + name + "\"");
    }
    throw bad("expected a \"finite\" or \"family\" entry");
}

ArrivalLaw load_law(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw bad("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw bad(path.string() + ": " + e.what());
    }
    return law_from_json(doc);
}

json law_to_json(const ArrivalLaw& law) {
    switch (law.kind()) {
    case LawKind::FiniteSupport: {
        json arr = json::array();
        const std::span<const Rational> probs = *law.exact_probs();
        for (const auto& p : probs) arr.push_back(to_string(p));
        return json{{"finite", arr}};
    }
    case LawKind::Binary0k: {
        // alpha = k mu_k, kept exact.
        const Rational alpha = (*law.exact_probs())[static_cast<std::size_t>(law.k())] * law.k();
        return json{{"family", {{"name", "binary0k"}, {"alpha", to_string(alpha)}, {"k", law.k()}}}};
    }
    case LawKind::Poisson: return json{{"family", {{"name", "poisson"}, {"alpha", law.alpha()}}}};
    case LawKind::Geometric: return json{{"family", {{"name", "geometric"}, {"alpha", law.alpha()}}}};
    case LawKind::CustomAnalytic:
        if (!std::isnan(law.mix())) return json{{"family", {{"name", "nongeneric_example"}, {"mix", law.mix()}}}};
        return json{{"custom", law.name()}};
    }
    return json{};
}

} // namespace parkcrit
