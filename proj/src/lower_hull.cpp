#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "plc/lower_hull.hpp"
#include "plc/random.hpp"

namespace plc::hull {
namespace {

struct Facet {
  std::array<int, 3> v{};    // outward normal by the right-hand rule
  std::array<int, 3> adj{};  // adj[k] shares the edge v[k] -> v[k+1]
  bool alive = true;
  std::vector<int> conflicts;
};

class IncrementalHull {
 public:
  IncrementalHull(std::span<const LatticePoint> pts, std::uint64_t seed) : pts_(pts) {
    const int n = static_cast<int>(pts.size());
    order_.resize(pts.size());
    std::iota(order_.begin(), order_.end(), 0);
    Rng rng(seed);
    rng.shuffle(order_);
    point_facets_.resize(pts.size());
    point_mark_.assign(pts.size(), -1);

    seed_tetrahedron();
    for (int i = 4; i < n; ++i) insert(i);
  }

  std::vector<std::array<int, 3>> lower_facets() const {
    std::vector<std::array<int, 3>> out;
    for (const Facet& f : facets_) {
      if (!f.alive) continue;
      const auto& a = pts_[static_cast<std::size_t>(f.v[0])];
      const auto& b = pts_[static_cast<std::size_t>(f.v[1])];
      const auto& c = pts_[static_cast<std::size_t>(f.v[2])];
      // Outward normal pointing down means clockwise seen from above.
      if (orient2d(a, b, c) < 0) out.push_back({f.v[0], f.v[2], f.v[1]});
    }
    return out;
  }

 private:
  bool visible(const Facet& f, int p) const {
    return orient3d(pts_, f.v[0], f.v[1], f.v[2], p) > 0;
  }

  void seed_tetrahedron() {
    const int a = order_[0];
    const int b = order_[1];
    const int c = order_[2];
    const int d = order_[3];
    const std::array<std::array<int, 4>, 4> faces{{{a, b, c, d}, {a, d, b, c}, {a, c, d, b}, {b, d, c, a}}};
    for (const auto& f : faces) {
      Facet facet;
      facet.v = {f[0], f[1], f[2]};
      if (orient3d(pts_, f[0], f[1], f[2], f[3]) > 0) std::swap(facet.v[1], facet.v[2]);
      facets_.push_back(std::move(facet));
    }
    for (std::size_t i = 0; i < 4; ++i) {
      for (int k = 0; k < 3; ++k) {
        const int from = facets_[i].v[static_cast<std::size_t>(k)];
        const int to = facets_[i].v[static_cast<std::size_t>((k + 1) % 3)];
        for (std::size_t j = 0; j < 4; ++j) {
          if (j != i && edge_index(facets_[j], to, from) >= 0) {
            facets_[i].adj[static_cast<std::size_t>(k)] = static_cast<int>(j);
          }
        }
      }
    }
    for (std::size_t i = 4; i < order_.size(); ++i) {
      const int p = order_[i];
      for (int f = 0; f < 4; ++f) {
        if (visible(facets_[static_cast<std::size_t>(f)], p)) add_conflict(f, p);
      }
    }
  }

  static int edge_index(const Facet& f, int from, int to) {
    for (int k = 0; k < 3; ++k) {
      if (f.v[static_cast<std::size_t>(k)] == from && f.v[static_cast<std::size_t>((k + 1) % 3)] == to) return k;
    }
    return -1;
  }

  void add_conflict(int f, int p) {
    facets_[static_cast<std::size_t>(f)].conflicts.push_back(p);
    point_facets_[static_cast<std::size_t>(p)].push_back(f);
  }

  void insert(int step) {
    const int p = order_[static_cast<std::size_t>(step)];
    std::vector<int> visible_set;
    for (int f : point_facets_[static_cast<std::size_t>(p)]) {
      if (facets_[static_cast<std::size_t>(f)].alive) visible_set.push_back(f);
    }
    point_facets_[static_cast<std::size_t>(p)].clear();
    if (visible_set.empty()) return;

    if (visible_mark_.size() < facets_.size()) visible_mark_.resize(facets_.size(), -1);
    for (int f : visible_set) visible_mark_[static_cast<std::size_t>(f)] = step;

    struct Horizon {
      int from, to, inside, outside;
    };
    std::vector<Horizon> horizon;
    for (int f : visible_set) {
      const Facet& facet = facets_[static_cast<std::size_t>(f)];
      for (int k = 0; k < 3; ++k) {
        const int g = facet.adj[static_cast<std::size_t>(k)];
        if (visible_mark_[static_cast<std::size_t>(g)] != step) {
          horizon.push_back({facet.v[static_cast<std::size_t>(k)], facet.v[static_cast<std::size_t>((k + 1) % 3)], f, g});
        }
      }
    }

    std::unordered_map<int, int> by_first;
    std::unordered_map<int, int> by_second;
    std::vector<int> created;
    for (const Horizon& e : horizon) {
      const int nf = static_cast<int>(facets_.size());
      Facet facet;
      facet.v = {e.from, e.to, p};
      facet.adj[0] = e.outside;
      Facet& outer = facets_[static_cast<std::size_t>(e.outside)];
      outer.adj[static_cast<std::size_t>(edge_index(outer, e.to, e.from))] = nf;
      facets_.push_back(std::move(facet));
      by_first[e.from] = nf;
      by_second[e.to] = nf;
      created.push_back(nf);

      // Conflicts of the new facet come from the two facets it replaces.
      const std::size_t stamp = facets_.size();
      for (int src : {e.inside, e.outside}) {
        for (int q : facets_[static_cast<std::size_t>(src)].conflicts) {
          if (q == p || point_mark_[static_cast<std::size_t>(q)] == static_cast<std::int64_t>(stamp)) continue;
          point_mark_[static_cast<std::size_t>(q)] = static_cast<std::int64_t>(stamp);
          if (visible(facets_[static_cast<std::size_t>(nf)], q)) add_conflict(nf, q);
        }
      }
    }
    for (int nf : created) {
      Facet& facet = facets_[static_cast<std::size_t>(nf)];
      facet.adj[1] = by_first.at(facet.v[1]);
      facet.adj[2] = by_second.at(facet.v[0]);
    }

    for (int f : visible_set) {
      Facet& facet = facets_[static_cast<std::size_t>(f)];
      facet.alive = false;
      for (int q : facet.conflicts) {
        auto& list = point_facets_[static_cast<std::size_t>(q)];
        std::erase_if(list, [this](int g) { return !facets_[static_cast<std::size_t>(g)].alive; });
      }
      std::vector<int>().swap(facet.conflicts);
    }
  }

  std::span<const LatticePoint> pts_;
  std::vector<int> order_;
  std::vector<Facet> facets_;
  std::vector<std::vector<int>> point_facets_;
  std::vector<int> visible_mark_;
  std::vector<std::int64_t> point_mark_;
};

}  // namespace

std::vector<std::array<int, 3>> lower_hull_2d(std::span<const LatticePoint> pts, std::uint64_t seed) {
  if (pts.size() < 4) throw std::invalid_argument("lower_hull_2d needs at least 4 points");
  IncrementalHull hull(pts, seed);
  return hull.lower_facets();
}

}  // namespace plc::hull
