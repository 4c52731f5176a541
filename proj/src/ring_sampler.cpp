#include "shaperet/ring_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_set>

namespace shaperet {

namespace {

// Closest point on triangle (a, b, c) to p; returns squared distance.
double triangle_distance2(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.squaredNorm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.squaredNorm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double t = d1 / (d1 - d3);
    return (p - (a + t * ab)).squaredNorm();
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.squaredNorm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double t = d2 / (d2 - d6);
    return (p - (a + t * ac)).squaredNorm();
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + t * (c - b))).squaredNorm();
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return (p - (a + ab * v + ac * w)).squaredNorm();
}

// Crossing of the sphere with edge (lo, hi), lo < hi; `which` orders two
// crossings on the same edge along lo -> hi.
struct CrossingKey {
  Index lo, hi;
  int which;
  auto operator<=>(const CrossingKey&) const = default;
};

struct Crossing {
  CrossingKey key;
  SurfacePoint point;
  double t_dir;     // parameter along the face's traversal direction
  bool entering;    // boundary traversal moves from outside to inside
};

class RingBuilder {
 public:
  RingBuilder(const TriMesh& mesh, Index center, double radius)
      : mesh_(mesh), p_(mesh.vertex(center)), r2_(radius * radius) {}

  std::vector<Polyline> components(Index center) {
    collect_faces(center);
    std::vector<std::pair<Crossing, Crossing>> segments;
    for (Index f : faces_) face_segments(f, segments);
    return chain(segments);
  }

 private:
  bool inside(Index v) const { return (mesh_.vertex(v) - p_).squaredNorm() < r2_; }

  void collect_faces(Index center) {
    std::vector<Index> stack(mesh_.incident_faces(center).begin(),
                             mesh_.incident_faces(center).end());
    std::unordered_set<Index> seen(stack.begin(), stack.end());
    while (!stack.empty()) {
      const Index f = stack.back();
      stack.pop_back();
      const auto& t = mesh_.face(f);
      if (triangle_distance2(p_, mesh_.vertex(t[0]), mesh_.vertex(t[1]), mesh_.vertex(t[2])) >
          r2_) {
        continue;
      }
      faces_.push_back(f);
      for (Index v : t) {
        for (Index g : mesh_.incident_faces(v)) {
          if (seen.insert(g).second) stack.push_back(g);
        }
      }
    }
    std::sort(faces_.begin(), faces_.end());
  }

  // Roots of |a + t (b - a) - p| = r on [0, 1] for canonical edge lo < hi.
  std::vector<double> edge_roots(Index lo, Index hi) const {
    const Vec3& a = mesh_.vertex(lo);
    const Vec3 d = mesh_.vertex(hi) - a;
    const Vec3 m = a - p_;
    const double qa = d.squaredNorm();
    const double qb = m.dot(d);
    const double qc = m.squaredNorm() - r2_;
    const double disc = qb * qb - qa * qc;
    const bool in_lo = inside(lo), in_hi = inside(hi);
    if (in_lo && in_hi) return {};
    if (disc < 0 || qa <= 0) return {};
    const double s = std::sqrt(disc);
    const double t0 = (-qb - s) / qa, t1 = (-qb + s) / qa;
    if (in_lo != in_hi) return {std::clamp(in_lo ? t1 : t0, 0.0, 1.0)};
    if (t0 > 0.0 && t1 < 1.0 && t0 < t1) return {t0, t1};
    return {};
  }

  void face_segments(Index f, std::vector<std::pair<Crossing, Crossing>>& out) const {
    const auto& t = mesh_.face(f);
    std::vector<Crossing> boundary;
    for (int e = 0; e < 3; ++e) {
      const Index from = t[e], to = t[(e + 1) % 3];
      const Index lo = std::min(from, to), hi = std::max(from, to);
      const auto roots = edge_roots(lo, hi);
      std::vector<Crossing> local;
      for (std::size_t k = 0; k < roots.size(); ++k) {
        Crossing c;
        c.key = {lo, hi, static_cast<int>(k)};
        const double tr = roots[k];
        c.point.pos = mesh_.vertex(lo) + tr * (mesh_.vertex(hi) - mesh_.vertex(lo));
        c.point.verts = {lo, hi, lo, hi};
        c.point.weights = {1.0 - tr, tr, 0.0, 0.0};
        c.t_dir = from == lo ? tr : 1.0 - tr;
        local.push_back(c);
      }
      std::sort(local.begin(), local.end(),
                [](const Crossing& x, const Crossing& y) { return x.t_dir < y.t_dir; });
      bool state = inside(from);
      for (auto& c : local) {
        c.entering = !state;
        state = !state;
        boundary.push_back(c);
      }
    }
    const auto n = boundary.size();
    if (n < 2) return;
    // Each exit crossing connects to the next entering crossing along the boundary.
    for (std::size_t i = 0; i < n; ++i) {
      if (boundary[i].entering) continue;
      for (std::size_t j = 1; j < n; ++j) {
        const auto& next = boundary[(i + j) % n];
        if (next.entering) {
          out.emplace_back(boundary[i], next);
          break;
        }
      }
    }
  }

  static std::vector<Polyline> chain(const std::vector<std::pair<Crossing, Crossing>>& segments) {
    std::multimap<CrossingKey, std::size_t> at;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      at.emplace(segments[s].first.key, s);
      at.emplace(segments[s].second.key, s);
    }
    std::vector<char> used(segments.size(), 0);

    auto next_segment = [&](const CrossingKey& key, std::size_t from) -> std::ptrdiff_t {
      auto [lo, hi] = at.equal_range(key);
      for (auto it = lo; it != hi; ++it) {
        if (it->second != from && !used[it->second]) return static_cast<std::ptrdiff_t>(it->second);
      }
      return -1;
    };
    auto walk = [&](std::size_t start, bool forward_from_first) {
      Polyline line;
      std::size_t seg = start;
      CrossingKey head = forward_from_first ? segments[seg].first.key : segments[seg].second.key;
      line.points.push_back(forward_from_first ? segments[seg].first.point
                                               : segments[seg].second.point);
      for (;;) {
        used[seg] = 1;
        const auto& [a, b] = segments[seg];
        const bool a_is_head = a.key == head;
        const auto& tail = a_is_head ? b : a;
        line.points.push_back(tail.point);
        head = tail.key;
        const auto nxt = next_segment(head, seg);
        if (nxt < 0) break;
        seg = static_cast<std::size_t>(nxt);
      }
      return line;
    };

    std::vector<Polyline> lines;
    // Open chains first: start at keys used by a single segment.
    for (std::size_t s = 0; s < segments.size(); ++s) {
      if (used[s]) continue;
      for (int end = 0; end < 2; ++end) {
        const auto& key = end == 0 ? segments[s].first.key : segments[s].second.key;
        if (at.count(key) == 1 && !used[s]) {
          auto line = walk(s, end == 0);
          line.closed = false;
          lines.push_back(std::move(line));
        }
      }
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
      if (used[s]) continue;
      auto line = walk(s, true);
      // The walk returns to its starting crossing; drop the repeated point.
      if (line.points.size() > 1 &&
          (line.points.front().pos - line.points.back().pos).squaredNorm() == 0.0) {
        line.points.pop_back();
      }
      line.closed = true;
      lines.push_back(std::move(line));
    }
    for (auto& line : lines) {
      // Coincident consecutive points arise when the sphere passes through a vertex.
      auto& pts = line.points;
      pts.erase(std::unique(pts.begin(), pts.end(),
                            [](const SurfacePoint& x, const SurfacePoint& y) {
                              return (x.pos - y.pos).squaredNorm() == 0.0;
                            }),
                pts.end());
    }
    return lines;
  }

  const TriMesh& mesh_;
  Vec3 p_;
  double r2_;
  std::vector<Index> faces_;
};

SurfacePoint blend(const SurfacePoint& a, const SurfacePoint& b, double lambda) {
  SurfacePoint out;
  out.pos = (1.0 - lambda) * a.pos + lambda * b.pos;
  // Edge crossings carry their weight in the first two slots.
  out.verts = {a.verts[0], a.verts[1], b.verts[0], b.verts[1]};
  out.weights = {(1.0 - lambda) * a.weights[0], (1.0 - lambda) * a.weights[1],
                 lambda * b.weights[0], lambda * b.weights[1]};
  return out;
}

}  // namespace

double Polyline::length() const {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    len += (points[i + 1].pos - points[i].pos).norm();
  }
  if (closed && points.size() > 1) len += (points.front().pos - points.back().pos).norm();
  return len;
}

std::vector<double> ring_radii(double diagonal, int rings) {
  if (!(diagonal > 0.0) || !std::isfinite(diagonal)) {
    throw std::invalid_argument("bounding-box diagonal must be positive");
  }
  if (rings < 1) throw std::invalid_argument("ring count must be at least 1");
  const double step = diagonal * kRingExtent / rings;
  std::vector<double> radii(static_cast<std::size_t>(rings));
  for (int j = 1; j <= rings; ++j) radii[j - 1] = j * step;
  return radii;
}

std::optional<Polyline> extract_ring(const TriMesh& mesh, Index center, const Vec3& normal,
                                     double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ring radius must be positive");
  if (center >= mesh.num_vertices()) throw MeshError("ring center out of range");
  RingBuilder builder(mesh, center, radius);
  auto comps = builder.components(center);
  std::erase_if(comps, [](const Polyline& l) { return l.points.size() < 2; });
  if (comps.empty()) return std::nullopt;

  const Vec3& p = mesh.vertex(center);
  auto centroid_dist = [&](const Polyline& l) {
    Vec3 c = Vec3::Zero();
    for (const auto& q : l.points) c += q.pos;
    return (c / static_cast<double>(l.points.size()) - p).squaredNorm();
  };
  std::size_t best = 0;
  double best_d = centroid_dist(comps[0]);
  for (std::size_t i = 1; i < comps.size(); ++i) {
    const double d = centroid_dist(comps[i]);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  Polyline ring = std::move(comps[best]);

  double orient = 0.0;
  const auto& pts = ring.points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i].pos;
    const auto& b = pts[(i + 1) % pts.size()].pos;
    orient += (a - p).cross(b - p).dot(normal);
  }
  if (orient < 0.0) std::reverse(ring.points.begin(), ring.points.end());
  return ring;
}

std::optional<std::vector<SurfacePoint>> resample_ring(const Polyline& ring, double spacing,
                                                       const Vec3& start_hint) {
  if (!(spacing > 0.0)) throw std::invalid_argument("resample spacing must be positive");
  const auto& pts = ring.points;
  const std::size_t nseg = ring.closed ? pts.size() : pts.size() - 1;
  if (pts.size() < 2) return std::nullopt;
  const double total = ring.length();
  if (!(total >= 3.0 * spacing)) return std::nullopt;

  std::vector<double> cum(nseg + 1, 0.0);
  for (std::size_t i = 0; i < nseg; ++i) {
    cum[i + 1] = cum[i] + (pts[(i + 1) % pts.size()].pos - pts[i].pos).norm();
  }

  // Start at the closest point to the hint (continuous over segments).
  double start = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nseg; ++i) {
    const Vec3& a = pts[i].pos;
    const Vec3 d = pts[(i + 1) % pts.size()].pos - a;
    const double len2 = d.squaredNorm();
    const double lam = len2 > 0 ? std::clamp((start_hint - a).dot(d) / len2, 0.0, 1.0) : 0.0;
    const double dist = (a + lam * d - start_hint).squaredNorm();
    if (dist < best) {
      best = dist;
      start = cum[i] + lam * (cum[i + 1] - cum[i]);
    }
  }
  if (!ring.closed) start = 0.0;

  // Lengths within 0.1% of a spacing below an integer multiple count as that multiple.
  const auto count = std::max<std::size_t>(3, static_cast<std::size_t>(std::floor(total / spacing + 1e-3)));
  std::vector<SurfacePoint> out;
  out.reserve(count);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    double s = start + static_cast<double>(k) * spacing;
    if (ring.closed) s = std::fmod(s, total);
    s = std::min(s, total);
    if (ring.closed) {
      seg = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin());
      seg = seg == 0 ? 0 : seg - 1;
    } else {
      while (seg + 1 < nseg && cum[seg + 1] < s) ++seg;
    }
    seg = std::min(seg, nseg - 1);
    const double seg_len = cum[seg + 1] - cum[seg];
    const double lam = seg_len > 0 ? std::clamp((s - cum[seg]) / seg_len, 0.0, 1.0) : 0.0;
    out.push_back(blend(pts[seg], pts[(seg + 1) % pts.size()], lam));
  }
  return out;
}

std::array<double, kSamplesPerRing> histogram_sample(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("histogram sampling of an empty ring");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Percent positions in tenths; integer rounding avoids 0.3 * 5 = 1.4999...
  static constexpr std::array<std::size_t, kSamplesPerRing> tenths{0, 1, 3, 5, 7, 9, 10};
  const std::size_t last = sorted.size() - 1;
  std::array<double, kSamplesPerRing> out{};
  for (int i = 0; i < kSamplesPerRing; ++i) {
    out[i] = sorted[(2 * tenths[i] * last + 10) / 20];
  }
  return out;
}

RingSet build_ring_set(const TriMesh& mesh, const Vec3& normal, Index center,
                       std::span<const double> radii) {
  RingSet set;
  set.center = center;
  set.radii.assign(radii.begin(), radii.end());
  for (double r : radii) set.rings.push_back(extract_ring(mesh, center, normal, r));
  return set;
}

}  // namespace shaperet
