#ifndef DCTPLUS_GRAPH_HPP
#define DCTPLUS_GRAPH_HPP

#include <cstddef>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dctplus/matrix.hpp"

namespace dctplus {

/// Undirected weighted graph with optional self-loops. Vertex indices are
/// 1-based in this description (as in the text serialization); matrices use
/// 0-based rows/columns.
struct GraphSpec {
    struct Edge {
        std::size_t i, j; // 1 <= i < j <= n
        double w;
    };
    struct SelfLoop {
        std::size_t i; // 1 <= i <= n
        double w;
    };

    std::size_t n = 0;
    std::vector<Edge> edges;
    std::vector<SelfLoop> self_loops;

    void validate() const {
        if (n < 2) throw std::invalid_argument("GraphSpec: n must be >= 2");
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (const auto& e : edges) {
            if (e.i < 1 || e.j > n || e.i >= e.j)
                throw std::invalid_argument("GraphSpec: edge indices must satisfy 1 <= i < j <= n");
            if (!seen.insert({e.i, e.j}).second)
                throw std::invalid_argument("GraphSpec: duplicate edge");
        }
        for (const auto& s : self_loops)
            if (s.i < 1 || s.i > n)
                throw std::invalid_argument("GraphSpec: self-loop index out of range");
    }

    /// Unit-weight path graph on n vertices.
    static GraphSpec path(std::size_t n) {
        if (n < 2) throw std::invalid_argument("GraphSpec::path: n must be >= 2");
        GraphSpec g;
        g.n = n;
        g.edges.reserve(n - 1);
        for (std::size_t i = 1; i < n; ++i) g.edges.push_back({i, i + 1, 1.0});
        return g;
    }
};

/// Generalized graph Laplacian L = D - W + V, stored dense and exactly
/// symmetric by construction.
struct GeneralizedLaplacian {
    std::size_t n = 0;
    Matrix m;
};

inline GeneralizedLaplacian build_laplacian(const GraphSpec& g) {
    g.validate();
    GeneralizedLaplacian l{g.n, Matrix(g.n, g.n)};
    for (const auto& e : g.edges) {
        const std::size_t i = e.i - 1, j = e.j - 1;
        l.m(i, i) += e.w;
        l.m(j, j) += e.w;
        l.m(i, j) -= e.w;
        l.m(j, i) -= e.w;
    }
    for (const auto& s : g.self_loops) l.m(s.i - 1, s.i - 1) += s.w;
    return l;
}

inline GeneralizedLaplacian path_laplacian(std::size_t n) {
    return build_laplacian(GraphSpec::path(n));
}

/// Rank-one Laplacian update L = L~ + rho v v^T. The two graph scenarios are
/// a self-loop addition (v = e_i) and an edge-weight delta (v = e_i - e_j).
struct RankOneUpdate {
    enum class Kind { self_loop, edge_delta };

    Kind kind;
    double rho;
    std::size_t node_i = 0, node_j = 0; // 1-based

    static RankOneUpdate self_loop(std::size_t i, double w) {
        if (i < 1) throw std::invalid_argument("RankOneUpdate: node index is 1-based");
        if (w == 0.0) throw std::invalid_argument("RankOneUpdate: weight must be nonzero");
        return {Kind::self_loop, w, i, 0};
    }

    static RankOneUpdate edge_delta(std::size_t i, std::size_t j, double w) {
        if (i < 1 || i >= j) throw std::invalid_argument("RankOneUpdate: need 1 <= i < j");
        if (w == 0.0) throw std::invalid_argument("RankOneUpdate: weight must be nonzero");
        return {Kind::edge_delta, w, i, j};
    }

    std::vector<double> direction(std::size_t n) const {
        if (node_i > n || (kind == Kind::edge_delta && node_j > n))
            throw std::invalid_argument("RankOneUpdate: node index exceeds graph size");
        std::vector<double> v(n, 0.0);
        v[node_i - 1] = 1.0;
        if (kind == Kind::edge_delta) v[node_j - 1] = -1.0;
        return v;
    }
};

inline GeneralizedLaplacian apply_rank_one(const GeneralizedLaplacian& l, const RankOneUpdate& u) {
    const auto v = u.direction(l.n);
    GeneralizedLaplacian out = l;
    // Symmetric fill: (i,j) and (j,i) get the one computed value.
    for (std::size_t i = 0; i < l.n; ++i) {
        if (v[i] == 0.0) continue;
        for (std::size_t j = i; j < l.n; ++j) {
            if (v[j] == 0.0) continue;
            const double d = u.rho * v[i] * v[j];
            out.m(i, j) += d;
            if (j != i) out.m(j, i) += d;
        }
    }
    return out;
}

/// Rank-one "baby Laplacian" terms: one (w, e_i - e_j) per edge and one
/// (w, e_i) per self-loop. Summing w * v v^T over the list reassembles the
/// Laplacian exactly.
inline std::vector<std::pair<double, std::vector<double>>> baby_decomposition(const GraphSpec& g) {
    g.validate();
    std::vector<std::pair<double, std::vector<double>>> terms;
    terms.reserve(g.edges.size() + g.self_loops.size());
    for (const auto& e : g.edges) {
        std::vector<double> v(g.n, 0.0);
        v[e.i - 1] = 1.0;
        v[e.j - 1] = -1.0;
        terms.emplace_back(e.w, std::move(v));
    }
    for (const auto& s : g.self_loops) {
        std::vector<double> v(g.n, 0.0);
        v[s.i - 1] = 1.0;
        terms.emplace_back(s.w, std::move(v));
    }
    return terms;
}

inline double quadratic_form(const GeneralizedLaplacian& l, const std::vector<double>& s) {
    if (s.size() != l.n) throw std::invalid_argument("quadratic_form: dimension mismatch");
    return dot(s, matvec(l.m, s));
}

// --- text serialization -----------------------------------------------------
//
// First line: n. Then one line per item, "e i j w" for edges and "s i w" for
// self-loops. Blank lines are ignored.

inline void write_graph(std::ostream& os, const GraphSpec& g) {
    os << g.n << "\n";
    for (const auto& e : g.edges) os << "e " << e.i << " " << e.j << " " << e.w << "\n";
    for (const auto& s : g.self_loops) os << "s " << s.i << " " << s.w << "\n";
}

inline GraphSpec read_graph(std::istream& is) {
    GraphSpec g;
    std::string line;
    std::size_t lineno = 0;
    bool have_n = false;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        if (!have_n) {
            if (!(ls >> g.n))
                throw std::runtime_error("graph parse: expected vertex count on line 1");
            have_n = true;
            continue;
        }
        std::string tag;
        if (!(ls >> tag)) continue; // blank line
        if (tag == "e") {
            GraphSpec::Edge e{};
            if (!(ls >> e.i >> e.j >> e.w))
                throw std::runtime_error("graph parse: bad edge on line " + std::to_string(lineno));
            g.edges.push_back(e);
        } else if (tag == "s") {
            GraphSpec::SelfLoop s{};
            if (!(ls >> s.i >> s.w))
                throw std::runtime_error("graph parse: bad self-loop on line " + std::to_string(lineno));
            g.self_loops.push_back(s);
        } else {
            throw std::runtime_error("graph parse: unknown tag '" + tag + "' on line " +
                                     std::to_string(lineno));
        }
    }
    if (!have_n) throw std::runtime_error("graph parse: empty input");
    g.validate();
    return g;
}

} // namespace dctplus

#endif
