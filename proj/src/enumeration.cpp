#include "parkcrit/enumeration.hpp"

#include "parkcrit/error.hpp"
#include "parkcrit/parallel.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace parkcrit {

Address Address::child(int side) const {
    if (depth >= 32) throw Error(ErrorCode::InvalidInput, "address deeper than 32 levels");
    return Address{bits | (static_cast<std::uint32_t>(side & 1) << depth), static_cast<std::uint8_t>(depth + 1)};
}

Address Address::parent() const {
    if (depth == 0) throw Error(ErrorCode::InvalidInput, "the root has no parent");
    const auto d = static_cast<std::uint8_t>(depth - 1);
    return Address{bits & ~(std::uint32_t{1} << d), d};
}

std::string Address::to_string() const {
    if (depth == 0) return "root";
    std::string s;
    for (int i = 0; i < depth; ++i) s.push_back(((bits >> i) & 1u) ? '1' : '0');
    return s;
}

DecoratedTree::DecoratedTree(const std::map<Address, std::uint32_t>& arrivals) {
    if (!arrivals.contains(Address{})) throw Error(ErrorCode::InvalidInput, "decorated tree lacks the root");
    nodes_.reserve(arrivals.size());
    // The map orders by (depth, bits): parents come before children.
    for (const auto& [addr, a] : arrivals) {
        if (addr.depth < 32 && (addr.bits >> addr.depth) != 0)
            throw Error(ErrorCode::InvalidInput, "address has bits beyond its depth");
        nodes_.push_back(Node{addr, a, -1, {-1, -1}});
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        const Address& a = nodes_[i].address;
        const int p = index_of(a.parent());
        if (p < 0) throw Error(ErrorCode::InvalidInput, "parent of " + a.to_string() + " is missing");
        nodes_[i].parent = p;
        const int side = static_cast<int>((a.bits >> (a.depth - 1)) & 1u);
        nodes_[static_cast<std::size_t>(p)].child[side] = static_cast<int>(i);
    }
}

int DecoratedTree::index_of(const Address& a) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), a,
                               [](const Node& n, const Address& key) { return n.address < key; });
    if (it == nodes_.end() || it->address != a) return -1;
    return static_cast<int>(it - nodes_.begin());
}

bool ParkingOutcome::fully_parked() const {
    return std::all_of(visits.begin(), visits.end(), [](std::uint64_t v) { return v >= 1; });
}

ParkingOutcome park(const DecoratedTree& tree) {
    ParkingOutcome out;
    out.visits.assign(tree.size(), 0);
    for (std::size_t i = tree.size(); i-- > 0;) {
        std::uint64_t x = tree.arrivals(i);
        for (int side = 0; side < 2; ++side) {
            const int c = tree.child(i, side);
            if (c >= 0 && out.visits[static_cast<std::size_t>(c)] > 1) x += out.visits[static_cast<std::size_t>(c)] - 1;
        }
        out.visits[i] = x;
    }
    out.flux = out.visits[0] > 1 ? out.visits[0] - 1 : 0;
    return out;
}

std::string_view to_string(TableSource source) noexcept {
    return source == TableSource::TutteRecursion ? "tutte" : "brute_force";
}

namespace {

std::vector<Rational> exact_law(const ArrivalLaw& law) {
    auto probs = law.exact_probs();
    if (!probs) throw Error(ErrorCode::NotExact, "enumeration needs a finite-support law with rational atoms");
    return {probs->begin(), probs->end()};
}

void check_orders(int max_vertices, int max_flux) {
    if (max_vertices < 1 || max_flux < 0)
        throw Error(ErrorCode::InvalidParameter, "need N >= 1 and P >= 0");
}

Rational mu_at(const std::vector<Rational>& mu, int k) {
    return k < static_cast<int>(mu.size()) ? mu[static_cast<std::size_t>(k)] : Rational(0);
}

} // namespace

FptTable tutte_series(const ArrivalLaw& law, int max_vertices, int max_flux) {
    check_orders(max_vertices, max_flux);
    const int N = max_vertices;
    const int P = max_flux;
    FptTable table{exact_law(law), N, P, Series2<Rational>(N, P), TableSource::TutteRecursion};
    const Rational& mu0 = table.law[0];

    // Row n is kept to y-order P + N - n: later rows divide by y once per
    // step, and a tree on n vertices with flux p involves mu_{n + p}.
    auto y_order = [&](int n) { return P + N - n; };

    std::vector<Series1<Rational>> rows(static_cast<std::size_t>(N) + 1);
    rows[0] = Series1<Rational>(y_order(0));
    for (int n = 1; n <= N; ++n) {
        const int q = y_order(n - 1);
        Series1<Rational> G(q);
        for (int k = 0; k <= q; ++k) G[static_cast<std::size_t>(k)] = mu_at(table.law, k);

        // T = 2 F_{n-1} + sum_{i+j=n-1} F_i F_j with F_0 = 0.
        Series1<Rational> T = rows[static_cast<std::size_t>(n - 1)].truncated(q) * Rational(2);
        for (int i = 1; 2 * i <= n - 1; ++i) {
            const int j = n - 1 - i;
            Series1<Rational> prod = rows[static_cast<std::size_t>(i)].truncated(q) * rows[static_cast<std::size_t>(j)].truncated(q);
            if (i != j) prod *= Rational(2);
            T += prod;
        }

        Series1<Rational> bracket = T * G;
        bracket[0] -= T[0] * mu0;
        if (n == 1) {
            bracket += G;
            bracket[0] -= mu0;
        }
        rows[static_cast<std::size_t>(n)] = divide_by_y(bracket);
        table.coeffs.set_row(n, rows[static_cast<std::size_t>(n)]);
    }
    return table;
}

namespace {

using Shape = std::vector<Address>;

/// All prefix-closed vertex sets with n vertices hanging below `root`, each
/// listed as explicit addresses (left and right placements are distinct).
std::vector<Shape> shapes_below(const Address& root, int n) {
    std::vector<Shape> out;
    if (n == 0) {
        out.emplace_back();
        return out;
    }
    for (int left = 0; left < n; ++left) {
        auto ls = shapes_below(root.child(0), left);
        auto rs = shapes_below(root.child(1), n - 1 - left);
        for (const auto& l : ls) {
            for (const auto& r : rs) {
                Shape s;
                s.reserve(static_cast<std::size_t>(n));
                s.push_back(root);
                s.insert(s.end(), l.begin(), l.end());
                s.insert(s.end(), r.begin(), r.end());
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

struct ArrivalSearch {
    const std::vector<Rational>& mu;
    const std::vector<int>& support;
    const Shape& shape;
    int cap;
    int max_flux;
    Series2<Rational>& acc;
    std::vector<std::uint32_t> values;

    void run(std::size_t pos, int used, const Rational& weight) {
        if (pos == shape.size()) {
            std::map<Address, std::uint32_t> arrivals;
            for (std::size_t i = 0; i < shape.size(); ++i) arrivals.emplace(shape[i], values[i]);
            const ParkingOutcome o = park(DecoratedTree(arrivals));
            if (o.fully_parked() && o.flux <= static_cast<std::uint64_t>(max_flux))
                acc.at(static_cast<int>(shape.size()), static_cast<int>(o.flux)) += weight;
            return;
        }
        for (int a : support) {
            if (used + a > cap) break;
            values[pos] = static_cast<std::uint32_t>(a);
            run(pos + 1, used + a, weight * mu[static_cast<std::size_t>(a)]);
        }
    }
};

} // namespace

FptTable brute_force_F(const ArrivalLaw& law, int max_vertices, int max_flux) {
    check_orders(max_vertices, max_flux);
    if (max_vertices > 8) throw Error(ErrorCode::BudgetExceeded, "brute force is limited to N <= 8");
    const int N = max_vertices;
    const int P = max_flux;
    FptTable table{exact_law(law), N, P, Series2<Rational>(N, P), TableSource::BruteForce};

    std::vector<int> support;
    for (std::size_t a = 0; a < table.law.size(); ++a)
        if (sgn(table.law[a]) != 0) support.push_back(static_cast<int>(a));

    std::vector<Shape> shapes;
    for (int n = 1; n <= N; ++n) {
        auto s = shapes_below(Address{}, n);
        shapes.insert(shapes.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
    }

    const unsigned workers = std::min<unsigned>(worker_count(), static_cast<unsigned>(shapes.size()));
    std::vector<Series2<Rational>> partial(workers, Series2<Rational>(N, P));
    parallel_chunks(shapes.size(), workers, [&](unsigned w, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Shape& shape = shapes[i];
            // Every vertex parked with flux p uses exactly n + p cars.
            ArrivalSearch search{table.law, support, shape, static_cast<int>(shape.size()) + P, P, partial[w],
                                 std::vector<std::uint32_t>(shape.size(), 0)};
            search.run(0, 0, Rational(1));
        }
    });
    for (const auto& p : partial) table.coeffs += p;
    return table;
}

std::vector<std::pair<int, int>> table_mismatches(const FptTable& a, const FptTable& b) {
    detail::require_same_order(a.max_vertices, b.max_vertices, "compare");
    detail::require_same_order(a.max_flux, b.max_flux, "compare");
    std::vector<std::pair<int, int>> out;
    for (int n = 0; n <= a.max_vertices; ++n)
        for (int p = 0; p <= a.max_flux; ++p)
            if (a.at(n, p) != b.at(n, p)) out.emplace_back(n, p);
    return out;
}

TableFlux flux_via_table(const FptTable& table, double p_circ) {
    TableFlux out;
    out.prob.assign(static_cast<std::size_t>(table.max_flux) + 1, 0.0);
    out.tail_ratio.assign(out.prob.size(), 0.0);
    for (int k = 0; k <= table.max_flux; ++k) {
        double sum = 0.0;
        double last = 0.0;
        double power = p_circ;
        for (int n = 1; n <= table.max_vertices; ++n) {
            power *= p_circ;
            last = table.at(n, k).get_d() * power;
            sum += last;
        }
        out.prob[static_cast<std::size_t>(k)] = sum;
        out.tail_ratio[static_cast<std::size_t>(k)] = sum > 0.0 ? last / sum : 0.0;
    }
    return out;
}

void write_table_csv(std::ostream& out, const FptTable& table) {
    out << "n,p,numerator,denominator,source\n";
    for (int n = 0; n <= table.max_vertices; ++n) {
        for (int p = 0; p <= table.max_flux; ++p) {
            const Rational& c = table.at(n, p);
            out << n << ',' << p << ',' << c.get_num().get_str() << ',' << c.get_den().get_str() << ','
                << to_string(table.source) << '\n';
        }
    }
}

FptTable read_table_csv(std::istream& in) {
    auto bad = [](const std::string& what) { return Error(ErrorCode::InvalidInput, "table csv: " + what); };
    std::string line;
    if (!std::getline(in, line) || line.rfind("n,p,numerator,denominator,source", 0) != 0) throw bad("missing header");

    struct Entry {
        int n, p;
        Rational value;
    };
    std::vector<Entry> entries;
    std::string source;
    int N = 0;
    int P = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f[5];
        for (auto& field : f)
            if (!std::getline(ss, field, ',')) throw bad("short line '" + line + "'");
        Entry e{};
        try {
            e.n = std::stoi(f[0]);
            e.p = std::stoi(f[1]);
            mpz_class num(f[2]);
            mpz_class den(f[3]);
            if (den == 0) throw bad("zero denominator");
            e.value = Rational(num, den);
            e.value.canonicalize();
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw bad("malformed line '" + line + "'");
        }
        if (e.n < 0 || e.p < 0) throw bad("negative index");
        if (source.empty()) source = f[4];
        else if (source != f[4]) throw bad("mixed sources");
        N = std::max(N, e.n);
        P = std::max(P, e.p);
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw bad("no rows");
    FptTable table;
    table.max_vertices = N;
    table.max_flux = P;
    table.coeffs = Series2<Rational>(N, P);
    if (source == "tutte") table.source = TableSource::TutteRecursion;
    else if (source == "brute_force") table.source = TableSource::BruteForce;
    else throw bad("unknown source '" + source + "'");
    for (auto& e : entries) table.coeffs.at(e.n, e.p) = e.value;
    return table;
}

} // namespace parkcrit
