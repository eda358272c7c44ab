#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "snapout/error.hpp"

namespace snapout::detail {

// Network simplex for the dense uncapacitated transportation problem:
// minimize sum_ij x_ij c_ij subject to row sums a_i, column sums b_j,
// x >= 0, sum a == sum b. Spanning-tree basis with an artificial root,
// block-search pricing, Cunningham leaving-arc rule.
class TransportSimplex {
public:
    // cost is row-major m x n. Returns the optimal transport cost.
    double solve(const std::vector<double>& a, const std::vector<double>& b,
                 const std::vector<double>& cost) {
        m_ = static_cast<int>(a.size());
        n_ = static_cast<int>(b.size());
        cost_ = &cost;
        const int nodes = m_ + n_;
        root_ = nodes;

        double max_c = 0.0;
        for (double c : *cost_) max_c = std::max(max_c, std::abs(c));
        // Power of two keeps the big constant cancelling cleanly in reduced
        // costs computed from potentials of magnitude ~M.
        M_ = 1.0;
        const double want = (max_c + 1.0) * (nodes + 1);
        while (M_ < want) M_ *= 2.0;
        eps_ = std::max(1e-10, 1e-13 * M_);

        parent_.assign(nodes + 1, root_);
        pred_real_.assign(nodes + 1, -1);
        sgn_.assign(nodes + 1, 0);
        flow_.assign(nodes + 1, 0.0);
        pi_.assign(nodes + 1, 0.0);
        depth_.assign(nodes + 1, 1);
        first_child_.assign(nodes + 1, -1);
        next_sib_.assign(nodes + 1, -1);
        prev_sib_.assign(nodes + 1, -1);

        parent_[root_] = -1;
        depth_[root_] = 0;
        for (int v = 0; v < nodes; ++v) attach_child(root_, v);
        for (int i = 0; i < m_; ++i) {
            sgn_[i] = -1;  // stored artificial arc i -> root
            flow_[i] = a[i];
            pi_[i] = M_;
        }
        for (int j = 0; j < n_; ++j) {
            const int v = m_ + j;
            sgn_[v] = +1;  // root -> sink
            flow_[v] = b[j];
            pi_[v] = -M_;
        }

        next_arc_ = 0;
        const long arcs = static_cast<long>(m_) * n_;
        block_ = std::max<long>(64, static_cast<long>(std::sqrt(static_cast<double>(arcs))));
        const long max_pivots = 200000 + 200L * (m_ + n_);

        for (long it = 0;; ++it) {
            if (it > max_pivots) throw Error("network simplex: pivot limit exceeded");
            const long e = find_entering();
            if (e < 0) break;
            pivot(e);
        }

        double total = 0.0;
        const double art_tol = 1e-9 * std::max(1.0, total_supply(a));
        for (int v = 0; v < nodes; ++v) {
            if (pred_real_[v] >= 0) {
                total += flow_[v] * (*cost_)[pred_real_[v]];
            } else if (flow_[v] > art_tol) {
                throw Error("network simplex: unbalanced problem (artificial flow remains)");
            }
        }
        return total;
    }

    // Optimality certificate: primal flows feasible and all reduced costs
    // nonnegative up to tol. Intended for tests.
    bool verify(const std::vector<double>& a, const std::vector<double>& b, double tol) const {
        std::vector<double> row(m_, 0.0), col(n_, 0.0);
        for (int v = 0; v < m_ + n_; ++v) {
            if (pred_real_[v] < 0) continue;
            const int e = pred_real_[v];
            row[e / n_] += flow_[v];
            col[e % n_] += flow_[v];
        }
        for (int i = 0; i < m_; ++i)
            if (std::abs(row[i] - a[i]) > tol) return false;
        for (int j = 0; j < n_; ++j)
            if (std::abs(col[j] - b[j]) > tol) return false;
        for (long e = 0; e < static_cast<long>(m_) * n_; ++e)
            if (reduced_cost(e) < -tol) return false;
        return true;
    }

private:
    static double total_supply(const std::vector<double>& a) {
        double s = 0.0;
        for (double x : a) s += x;
        return s;
    }

    double reduced_cost(long e) const {
        const int u = static_cast<int>(e / n_);
        const int v = m_ + static_cast<int>(e % n_);
        return (*cost_)[e] - pi_[u] + pi_[v];
    }

    long find_entering() {
        const long arcs = static_cast<long>(m_) * n_;
        long best = -1;
        double best_rc = -eps_;
        long scanned = 0;
        for (long cnt = 0; cnt < arcs; ++cnt) {
            const long e = next_arc_;
            next_arc_ = (next_arc_ + 1 == arcs) ? 0 : next_arc_ + 1;
            const double rc = reduced_cost(e);
            if (rc < best_rc) {
                best_rc = rc;
                best = e;
            }
            if (++scanned == block_) {
                if (best >= 0) return best;
                scanned = 0;
            }
        }
        return best;
    }

    void attach_child(int p, int v) {
        parent_[v] = p;
        prev_sib_[v] = -1;
        next_sib_[v] = first_child_[p];
        if (first_child_[p] >= 0) prev_sib_[first_child_[p]] = v;
        first_child_[p] = v;
    }

    void detach_child(int v) {
        const int p = parent_[v];
        if (prev_sib_[v] >= 0)
            next_sib_[prev_sib_[v]] = next_sib_[v];
        else
            first_child_[p] = next_sib_[v];
        if (next_sib_[v] >= 0) prev_sib_[next_sib_[v]] = prev_sib_[v];
        prev_sib_[v] = next_sib_[v] = -1;
    }

    void pivot(long e) {
        const int s = static_cast<int>(e / n_);
        const int t = m_ + static_cast<int>(e % n_);
        const double rc = reduced_cost(e);

        // Join of the two tree paths.
        int u = s, v = t;
        while (u != v) {
            if (depth_[u] >= depth_[v])
                u = parent_[u];
            else
                v = parent_[v];
        }
        const int join = u;

        // delta flows s -> t on the entering arc and back t -> join -> s in
        // the tree. Blocking arcs point against the cycle orientation.
        spath_.clear();
        tpath_.clear();
        for (int w = s; w != join; w = parent_[w]) spath_.push_back(w);
        for (int w = t; w != join; w = parent_[w]) tpath_.push_back(w);

        double delta = std::numeric_limits<double>::infinity();
        int leave = -1;
        bool leave_on_spath = false;
        // Cunningham: traverse the cycle in flow direction starting at the
        // join (join -> s, entering arc, t -> join); leaving arc is the last
        // blocking arc attaining the minimum.
        for (std::size_t k = spath_.size(); k-- > 0;) {
            const int w = spath_[k];
            if (sgn_[w] != +1 && flow_[w] <= delta) {  // arc w -> parent opposes join -> s travel
                delta = flow_[w];
                leave = w;
                leave_on_spath = true;
            }
        }
        for (std::size_t k = 0; k < tpath_.size(); ++k) {
            const int w = tpath_[k];
            if (sgn_[w] != -1 && flow_[w] <= delta) {  // arc parent -> w opposes t -> join travel
                delta = flow_[w];
                leave = w;
                leave_on_spath = false;
            }
        }
        if (leave < 0) throw Error("network simplex: unbounded pivot");

        for (int w : spath_) flow_[w] += (sgn_[w] == +1) ? delta : -delta;
        for (int w : tpath_) flow_[w] += (sgn_[w] == -1) ? delta : -delta;

        // Re-root the detached subtree at the entering arc's endpoint inside
        // it and hang it off the other endpoint.
        const int r2 = leave_on_spath ? s : t;
        const int attach_to = leave_on_spath ? t : s;
        const double shift = leave_on_spath ? rc : -rc;

        chain_.clear();
        for (int w = r2; w != leave; w = parent_[w]) chain_.push_back(w);
        chain_.push_back(leave);

        saved_.clear();
        for (int w : chain_) saved_.push_back({flow_[w], sgn_[w], pred_real_[w]});

        for (std::size_t k = 0; k + 1 < chain_.size(); ++k) {
            const int lo = chain_[k];      // becomes the parent
            const int hi = chain_[k + 1];  // was the parent
            detach_child(hi);
            attach_child(lo, hi);
            flow_[hi] = saved_[k].flow;
            sgn_[hi] = static_cast<signed char>(-saved_[k].sgn);
            pred_real_[hi] = saved_[k].pred_real;
        }
        detach_child(r2);
        attach_child(attach_to, r2);
        flow_[r2] = delta;
        sgn_[r2] = leave_on_spath ? -1 : +1;  // stored direction is s -> t
        pred_real_[r2] = static_cast<int>(e);

        // Fix potentials and depths across the moved subtree.
        int w = r2;
        depth_[r2] = depth_[attach_to] + 1;
        pi_[r2] += shift;
        int child = first_child_[r2];
        if (child < 0) return;
        w = child;
        while (true) {
            depth_[w] = depth_[parent_[w]] + 1;
            pi_[w] += shift;
            if (first_child_[w] >= 0) {
                w = first_child_[w];
            } else {
                while (w != r2 && next_sib_[w] < 0) w = parent_[w];
                if (w == r2) break;
                w = next_sib_[w];
            }
        }
    }

    struct Saved {
        double flow;
        signed char sgn;
        int pred_real;
    };

    int m_ = 0, n_ = 0, root_ = 0;
    const std::vector<double>* cost_ = nullptr;
    double M_ = 1.0, eps_ = 1e-14;
    long next_arc_ = 0, block_ = 64;
    std::vector<int> parent_, pred_real_, depth_, first_child_, next_sib_, prev_sib_;
    std::vector<signed char> sgn_;
    std::vector<double> flow_, pi_;
    std::vector<int> spath_, tpath_, chain_;
    std::vector<Saved> saved_;
};

}  // namespace snapout::detail
