#pragma once

#include "parkcrit/arrival_law.hpp"
#include "parkcrit/rational.hpp"
#include "parkcrit/series.hpp"

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace parkcrit {

/// Vertex of the infinite binary tree: a word over {0, 1} (at most 32 letters).
/// Bit i of `bits` (counted from the root) is the i-th letter.
struct Address {
    std::uint32_t bits = 0;
    std::uint8_t depth = 0;

    Address child(int side) const;
    Address parent() const;
    std::string to_string() const;

    auto operator<=>(const Address& other) const {
        if (auto c = depth <=> other.depth; c != 0) return c;
        return bits <=> other.bits;
    }
    bool operator==(const Address&) const = default;
};

/// Finite prefix-closed set of vertices containing the root, each carrying a
/// number of arriving cars. Nodes are stored in breadth-first order, so a
/// reverse scan visits children before their parent.
class DecoratedTree {
public:
    /// Throws InvalidInput when the root is missing or a parent is absent.
    explicit DecoratedTree(const std::map<Address, std::uint32_t>& arrivals);

    std::size_t size() const noexcept { return nodes_.size(); }
    const Address& address(std::size_t i) const { return nodes_[i].address; }
    std::uint32_t arrivals(std::size_t i) const { return nodes_[i].arrivals; }
    /// Index of the child on `side` (0 or 1), or -1.
    int child(std::size_t i, int side) const { return nodes_[i].child[side]; }
    int parent(std::size_t i) const { return nodes_[i].parent; }
    int index_of(const Address& a) const;

private:
    struct Node {
        Address address;
        std::uint32_t arrivals;
        int parent;
        int child[2];
    };
    std::vector<Node> nodes_;
};

struct ParkingOutcome {
    /// Cars that visited each node, indexed like the tree's nodes.
    std::vector<std::uint64_t> visits;
    /// Cars leaving through the root, (visits[root] - 1)_+.
    std::uint64_t flux = 0;

    bool parked(std::size_t i) const { return visits[i] >= 1; }
    bool fully_parked() const;
};

/// X(u) = a_u + (X(u0) - 1)_+ + (X(u1) - 1)_+, evaluated bottom-up.
ParkingOutcome park(const DecoratedTree& tree);

enum class TableSource { TutteRecursion, BruteForce };

std::string_view to_string(TableSource source) noexcept;

/// Exact weights c_{n,p} = [x^n y^p] F of fully parked trees with n vertices
/// and outgoing flux p, for n <= max_vertices and p <= max_flux.
struct FptTable {
    std::vector<Rational> law;
    int max_vertices = 0;
    int max_flux = 0;
    Series2<Rational> coeffs;
    TableSource source = TableSource::TutteRecursion;

    const Rational& at(int n, int p) const { return coeffs.at(n, p); }
};

/// Tutte-equation fixed point. Each pass of F -> (bracket)/y fixes one more
/// x-order, so N passes suffice; only the new row is evaluated per pass.
FptTable tutte_series(const ArrivalLaw& law, int max_vertices, int max_flux);

/// Independent oracle: parks every arrival configuration on every embedded
/// subtree with at most max_vertices <= 8 vertices (BudgetExceeded beyond).
FptTable brute_force_F(const ArrivalLaw& law, int max_vertices, int max_flux);

/// (n, p) positions where the two tables disagree; throws OrderMismatch when
/// their shapes differ.
std::vector<std::pair<int, int>> table_mismatches(const FptTable& a, const FptTable& b);

struct TableFlux {
    /// prob[k] approximates P(X = k + 1) = p_circ sum_n c_{n,k} p_circ^n.
    std::vector<double> prob;
    /// Last retained term divided by the partial sum, per k.
    std::vector<double> tail_ratio;
};

TableFlux flux_via_table(const FptTable& table, double p_circ);

/// CSV with header "n,p,numerator,denominator,source"; one line per (n, p).
void write_table_csv(std::ostream& out, const FptTable& table);
/// Reads a table written by write_table_csv (law left empty).
FptTable read_table_csv(std::istream& in);

} // namespace parkcrit
