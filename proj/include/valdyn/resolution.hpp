#pragma once

#include <string>
#include <vector>

#include "valdyn/arith.hpp"

namespace valdyn {

struct Prime {
    std::string id;
    int genus = 0;
    int self_int = -1;
    int b = 1;  // generic multiplicity
};

// An intersection point between two distinct primes.  The stored order fixes
// the orientation used for monomial weights: r belongs to `u`, s to `v`.
struct Edge {
    int u = 0;
    int v = 0;
};

// A half-infinite direction from a prime toward a non-exceptional curve
// (or any end of the valuation space) meeting it transversely once.
struct Ray {
    std::string label;
    int base = 0;
};

struct GraphCheck {
    bool connected = false;
    bool negative_definite = false;
    bool nef = false;
    std::vector<Rat> minors;
    std::vector<Rat> nef_row_sums;  // sum_j b_j M_ij per prime
};

class DualGraph {
public:
    DualGraph() = default;
    // Throws Error on malformed data; with `validate`, also requires the
    // graph to be connected, negative definite and nef.
    DualGraph(std::vector<Prime> primes, std::vector<Edge> edges, std::vector<Ray> rays = {},
              bool validate = true);

    std::size_t size() const { return primes_.size(); }
    const std::vector<Prime>& primes() const { return primes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<Ray>& rays() const { return rays_; }
    const Prime& prime(int i) const { return primes_.at(i); }
    const Edge& edge(int h) const { return edges_.at(h); }
    const Ray& ray(int h) const { return rays_.at(h); }

    int index_of(const std::string& id) const;  // throws unknown_prime
    bool has_prime(const std::string& id) const;
    int ray_index(const std::string& label) const;  // throws unknown_ray
    // Handle of the k-th parallel edge joining the two primes (either order).
    int edge_handle(int a, int b, int k = 0) const;
    int multiplicity(int a, int b) const;
    std::vector<int> neighbors(int i) const;  // with repetition for parallel edges
    int degree(int i) const;

    Mat intersection_matrix() const;
    // M^{-1}, cached at construction when the matrix is invertible.
    const Mat& dual_basis() const;
    bool has_dual_basis() const { return has_inverse_; }

    DualGraph with_rays(std::vector<Ray> extra) const;
    std::string fresh_id() const;

private:
    std::vector<Prime> primes_;
    std::vector<Edge> edges_;
    std::vector<Ray> rays_;
    Mat inverse_;
    bool has_inverse_ = false;
};

GraphCheck check_graph(const DualGraph& g);
Mat intersection_matrix(const DualGraph& g);
bool check_negative_definite(const Mat& m);
bool is_connected(const DualGraph& g);
Mat dual_basis(const DualGraph& g);

struct DiscrepancyTable {
    std::vector<Rat> k;       // coefficients of K_pi
    std::vector<Rat> a_div;   // 1 + k
    std::vector<Rat> a_norm;  // (1 + k) / b
};

DiscrepancyTable canonical_coeffs(const DualGraph& g);

struct Subgraph {
    std::vector<int> primes;
    std::vector<int> edges;  // handles into the parent graph
};

Subgraph essential_skeleton(const DualGraph& g);

enum class LcClass { LogTerminal, LcNotLt, NotLc };

struct Classification {
    LcClass cls;
    std::string type;  // cyclic-quotient, other-quotient, cusp, simple-elliptic, ...
    Rat min_a_norm;
};

std::string to_string(LcClass c);
Classification classify_singularity(const DualGraph& g, const DiscrepancyTable& table);
Classification classify_singularity(const DualGraph& g);

DualGraph blowup_free(const DualGraph& g, int prime, std::string new_id = {});
DualGraph blowup_satellite(const DualGraph& g, int edge, std::string new_id = {});

std::string to_dot(const DualGraph& g);

}  // namespace valdyn
