// Primal network simplex for the complete bipartite transportation problem.
//
// Nodes 0..m-1 are sources, m..m+n-1 sinks, m+n an artificial root joined to
// every node by a big-M arc. The spanning tree keeps parent pointers, depth,
// and sibling-linked child lists; entering arcs come from block search and the
// leaving arc follows the strongly-feasible tie rule so degenerate pivots
// cannot cycle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hmlab/errors.hpp"
#include "hmlab/transport.hpp"

namespace hmlab {
namespace {

class BipartiteSimplex {
 public:
  BipartiteSimplex(std::span<const Point> sources, std::span<const double> supply,
                   std::span<const Point> sinks, std::span<const double> demand)
      : src_(sources),
        dst_(sinks),
        m_(static_cast<long long>(sources.size())),
        n_(static_cast<long long>(sinks.size())),
        root_(static_cast<int>(m_ + n_)) {
    double max_cost = 0.0;
    for (const Point& a : src_) {
      for (const Point& b : dst_) max_cost = std::max(max_cost, distance(a, b));
    }
    big_m_ = (max_cost + 1.0) * static_cast<double>(m_ + n_ + 1);
    tolerance_ = 1e-12 * big_m_;

    const int nodes = root_ + 1;
    parent_.assign(nodes, -1);
    parent_arc_.assign(nodes, -1);
    up_.assign(nodes, 0);
    flow_.assign(nodes, 0.0);
    pi_.assign(nodes, 0.0);
    depth_.assign(nodes, 0);
    first_child_.assign(nodes, -1);
    next_sib_.assign(nodes, -1);
    prev_sib_.assign(nodes, -1);

    for (int v = 0; v < root_; ++v) {
      parent_[v] = root_;
      parent_arc_[v] = m_ * n_ + v;
      depth_[v] = 1;
      attach(v, root_);
      if (v < m_) {
        up_[v] = 1;
        flow_[v] = supply[v];
        pi_[v] = -big_m_;
      } else {
        up_[v] = 0;
        flow_[v] = demand[v - m_];
        pi_[v] = big_m_;
      }
    }
  }

  void run() {
    const long long total = m_ * n_;
    if (total == 0) return;
    const long long block = std::max<long long>(16, static_cast<long long>(std::sqrt(double(total))));
    long long next = 0;
    for (;;) {
      double best = -tolerance_;
      long long best_arc = -1;
      long long count = 0;
      for (long long scanned = 0; scanned < total; ++scanned) {
        const long long a = next;
        next = next + 1 == total ? 0 : next + 1;
        const double rc = cost(a) + pi_[tail(a)] - pi_[head(a)];
        if (rc < best) {
          best = rc;
          best_arc = a;
        }
        if (++count == block) {
          if (best_arc >= 0) break;
          count = 0;
        }
      }
      if (best_arc < 0) break;
      pivot(best_arc);
    }
  }

  TransportPlan plan() const {
    TransportPlan plan;
    double artificial = 0.0;
    for (int v = 0; v < root_; ++v) {
      const long long a = parent_arc_[v];
      if (a >= m_ * n_) {
        artificial = std::max(artificial, flow_[v]);
        continue;
      }
      if (flow_[v] > 0.0) {
        plan.pairs.push_back({static_cast<std::size_t>(tail(a)),
                              static_cast<std::size_t>(head(a) - m_), flow_[v]});
      }
    }
    if (artificial > 1e-9) throw MassMismatch("transportation problem is unbalanced");
    std::sort(plan.pairs.begin(), plan.pairs.end(), [](const PlanEntry& x, const PlanEntry& y) {
      return x.source != y.source ? x.source < y.source : x.target < y.target;
    });
    for (const PlanEntry& e : plan.pairs) plan.cost += e.mass * distance(src_[e.source], dst_[e.target]);
    return plan;
  }

 private:
  int tail(long long a) const {
    if (a < m_ * n_) return static_cast<int>(a / n_);
    const int v = static_cast<int>(a - m_ * n_);
    return v < m_ ? v : root_;
  }
  int head(long long a) const {
    if (a < m_ * n_) return static_cast<int>(m_ + a % n_);
    const int v = static_cast<int>(a - m_ * n_);
    return v < m_ ? root_ : v;
  }
  double cost(long long a) const {
    if (a < m_ * n_) return distance(src_[a / n_], dst_[a % n_]);
    return big_m_;
  }

  void attach(int c, int p) {
    next_sib_[c] = first_child_[p];
    prev_sib_[c] = -1;
    if (first_child_[p] >= 0) prev_sib_[first_child_[p]] = c;
    first_child_[p] = c;
  }
  void detach(int c) {
    const int p = parent_[c];
    if (prev_sib_[c] >= 0) {
      next_sib_[prev_sib_[c]] = next_sib_[c];
    } else {
      first_child_[p] = next_sib_[c];
    }
    if (next_sib_[c] >= 0) prev_sib_[next_sib_[c]] = prev_sib_[c];
    next_sib_[c] = prev_sib_[c] = -1;
  }

  void pivot(long long entering) {
    const int u = tail(entering);
    const int v = head(entering);
    int a = u;
    int b = v;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = parent_[a];
      } else if (depth_[b] > depth_[a]) {
        b = parent_[b];
      } else {
        a = parent_[a];
        b = parent_[b];
      }
    }
    const int join = a;

    // Flow is pushed around join -> u -> v -> join. Backward tree arcs bound
    // the step; ties go to the last one met in that order.
    double delta = std::numeric_limits<double>::infinity();
    int leave = -1;
    bool leave_on_u_side = false;
    for (int x = u; x != join; x = parent_[x]) {
      if (up_[x] && flow_[x] < delta) {
        delta = flow_[x];
        leave = x;
        leave_on_u_side = true;
      }
    }
    for (int x = v; x != join; x = parent_[x]) {
      if (!up_[x] && flow_[x] <= delta) {
        delta = flow_[x];
        leave = x;
        leave_on_u_side = false;
      }
    }
    if (leave < 0) throw Error("network simplex: unbounded pivot");

    if (delta > 0.0) {
      for (int x = u; x != join; x = parent_[x]) flow_[x] += up_[x] ? -delta : delta;
      for (int x = v; x != join; x = parent_[x]) flow_[x] += up_[x] ? delta : -delta;
    }

    // Re-hang the subtree cut off by the leaving arc below the entering arc.
    const int inner = leave_on_u_side ? u : v;
    const int outer = leave_on_u_side ? v : u;
    long long carry_arc = entering;
    double carry_flow = delta;
    signed char carry_up = inner == u ? 1 : 0;
    int new_parent = outer;
    int cur = inner;
    for (;;) {
      const int old_parent = parent_[cur];
      const long long old_arc = parent_arc_[cur];
      const double old_flow = flow_[cur];
      const signed char old_up = up_[cur];
      detach(cur);
      parent_[cur] = new_parent;
      parent_arc_[cur] = carry_arc;
      flow_[cur] = carry_flow;
      up_[cur] = carry_up;
      attach(cur, new_parent);
      if (cur == leave) break;
      carry_arc = old_arc;
      carry_flow = old_flow;
      carry_up = old_up ? 0 : 1;
      new_parent = cur;
      cur = old_parent;
    }

    const double c = cost(entering);
    const double target = inner == u ? pi_[v] - c : pi_[u] + c;
    const double shift = target - pi_[inner];
    stack_.clear();
    stack_.push_back(inner);
    while (!stack_.empty()) {
      const int x = stack_.back();
      stack_.pop_back();
      pi_[x] += shift;
      depth_[x] = depth_[parent_[x]] + 1;
      for (int ch = first_child_[x]; ch >= 0; ch = next_sib_[ch]) stack_.push_back(ch);
    }
  }

  std::span<const Point> src_;
  std::span<const Point> dst_;
  long long m_;
  long long n_;
  int root_;
  double big_m_ = 0.0;
  double tolerance_ = 0.0;
  std::vector<int> parent_;
  std::vector<long long> parent_arc_;
  std::vector<signed char> up_;
  std::vector<double> flow_;
  std::vector<double> pi_;
  std::vector<int> depth_;
  std::vector<int> first_child_, next_sib_, prev_sib_;
  std::vector<int> stack_;
};

}  // namespace

TransportPlan solve_transport_simplex(std::span<const Point> sources, std::span<const double> supply,
                                      std::span<const Point> sinks, std::span<const double> demand) {
  if (sources.size() != supply.size() || sinks.size() != demand.size()) {
    throw InvalidArgument("transport: point and weight counts differ");
  }
  if (sources.empty() || sinks.empty()) throw InvalidArgument("transport: empty measure");
  BipartiteSimplex solver(sources, supply, sinks, demand);
  solver.run();
  return solver.plan();
}

}  // namespace hmlab
