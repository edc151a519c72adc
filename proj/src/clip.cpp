#include "ipcfuse/clip.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "ipcfuse/errors.hpp"

namespace ipcfuse::geom {

namespace {

using I64 = int64_t;
using I128 = __int128;

struct IPt {
  I64 x = 0;
  I64 y = 0;
  friend bool operator==(const IPt& a, const IPt& b) = default;
  friend auto operator<=>(const IPt& a, const IPt& b) = default;
};

I64 to_grid(double deg) { return llround(deg / kSnapEps); }
double to_deg(I64 g) { return static_cast<double>(g) * kSnapEps; }

// Twice the signed area of triangle (a, b, c); > 0 when the triple is
// counter-clockwise, i.e. c lies left of the directed line a -> b.
I128 cross3(const IPt& a, const IPt& b, const IPt& c) {
  return (I128)(b.x - a.x) * (c.y - a.y) - (I128)(b.y - a.y) * (c.x - a.x);
}

// Nearest-integer division, half away from zero; d must be positive.
I128 div_round(I128 n, I128 d) {
  return n >= 0 ? (2 * n + d) / (2 * d) : -((-2 * n + d) / (2 * d));
}

enum class EdgeKind : uint8_t { Normal, NonContributing, SameTransition, DifferentTransition };

struct SweepEvent {
  IPt p;
  SweepEvent* other = nullptr;
  uint32_t serial = 0;
  bool left = false;
  bool subject = false;
  // sweep-time fields
  EdgeKind kind = EdgeKind::Normal;
  bool in_out = false;        // false: own-polygon interior lies above the segment
  bool other_in_out = false;  // false: other-polygon interior lies above the segment
  bool in_result = false;

  bool vertical() const { return p.x == other->p.x; }
  // True when the segment lies strictly below point q.
  bool below(const IPt& q) const {
    return left ? cross3(p, other->p, q) > 0 : cross3(other->p, p, q) > 0;
  }
  bool above(const IPt& q) const { return !below(q); }
};

// Queue order: ascending x, then y, right endpoints before left, lower
// segment first, subject before clipping. Returns <0 when a precedes b.
int compare_events(const SweepEvent* a, const SweepEvent* b) {
  if (a == b) return 0;
  if (a->p.x != b->p.x) return a->p.x < b->p.x ? -1 : 1;
  if (a->p.y != b->p.y) return a->p.y < b->p.y ? -1 : 1;
  if (a->left != b->left) return a->left ? 1 : -1;
  I128 area = cross3(a->p, a->other->p, b->other->p);
  if (area != 0) return area > 0 ? -1 : 1;
  if (a->subject != b->subject) return a->subject ? -1 : 1;
  return a->serial < b->serial ? -1 : 1;
}

struct QueueOrder {
  bool operator()(const SweepEvent* a, const SweepEvent* b) const {
    return compare_events(a, b) > 0;  // min-first priority queue
  }
};

// Status-line order between two left events: which segment is lower at the
// sweep front. Exact integer predicates keep this a strict weak order.
int compare_segments(const SweepEvent* le1, const SweepEvent* le2) {
  if (le1 == le2) return 0;
  if (cross3(le1->p, le1->other->p, le2->p) != 0 ||
      cross3(le1->p, le1->other->p, le2->other->p) != 0) {
    if (le1->p == le2->p) return le1->below(le2->other->p) ? -1 : 1;
    if (le1->p.x == le2->p.x) return le1->p.y < le2->p.y ? -1 : 1;
    if (compare_events(le1, le2) > 0) return le2->above(le1->p) ? -1 : 1;
    return le1->below(le2->p) ? -1 : 1;
  }
  // collinear segments
  if (le1->subject != le2->subject) return le1->subject ? -1 : 1;
  if (le1->p == le2->p && le1->other->p == le2->other->p)
    return le1->serial < le2->serial ? -1 : 1;
  return compare_events(le1, le2) > 0 ? 1 : -1;
}

struct SegmentOrder {
  bool operator()(const SweepEvent* a, const SweepEvent* b) const {
    return compare_segments(a, b) < 0;
  }
};

using StatusLine = std::set<SweepEvent*, SegmentOrder>;

struct SegInter {
  int n = 0;  // 0 disjoint, 1 single point, 2 collinear overlap
  IPt p0, p1;
};

SegInter segment_intersection(const IPt& a0, const IPt& a1, const IPt& b0, const IPt& b1) {
  const I128 dax = a1.x - a0.x, day = a1.y - a0.y;
  const I128 dbx = b1.x - b0.x, dby = b1.y - b0.y;
  const I128 ex = b0.x - a0.x, ey = b0.y - a0.y;
  I128 den = dax * dby - day * dbx;
  if (den != 0) {
    I128 tn = ex * dby - ey * dbx;  // param along a = tn/den
    I128 un = ex * day - ey * dax;  // param along b = un/den
    if (den < 0) {
      den = -den;
      tn = -tn;
      un = -un;
    }
    if (tn < 0 || tn > den || un < 0 || un > den) return {};
    SegInter r;
    r.n = 1;
    if (tn == 0) {
      r.p0 = a0;
    } else if (tn == den) {
      r.p0 = a1;
    } else if (un == 0) {
      r.p0 = b0;
    } else if (un == den) {
      r.p0 = b1;
    } else {
      // interior crossing: snap the exact rational point to the grid
      r.p0.x = a0.x + (I64)div_round(tn * dax, den);
      r.p0.y = a0.y + (I64)div_round(tn * day, den);
    }
    return r;
  }
  if (ex * day - ey * dax != 0) return {};  // parallel, distinct lines
  // collinear: order all four endpoints along a's direction
  auto param = [&](const IPt& q) -> I128 {
    return (I128)(q.x - a0.x) * dax + (I128)(q.y - a0.y) * day;
  };
  I128 s0 = param(b0), s1 = param(b1);
  IPt q0 = b0, q1 = b1;
  if (s0 > s1) {
    std::swap(s0, s1);
    std::swap(q0, q1);
  }
  const I128 t0 = 0, t1 = dax * dax + day * day;
  const I128 lo = std::max(t0, s0), hi = std::min(t1, s1);
  if (lo > hi) return {};
  SegInter r;
  r.p0 = (lo == t0) ? a0 : q0;
  r.p1 = (hi == t1) ? a1 : q1;
  r.n = (lo == hi) ? 1 : 2;
  return r;
}

class Sweep {
 public:
  Sweep() = default;

  void add_ring(const std::vector<Coord>& coords, bool subject) {
    std::vector<IPt> pts;
    pts.reserve(coords.size());
    for (const Coord& c : coords) pts.push_back({to_grid(c.lon), to_grid(c.lat)});
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      if (pts[i] == pts[i + 1]) continue;  // collapsed by snapping
      add_segment(pts[i], pts[i + 1], subject);
    }
  }

  // Runs the sweep and returns the result boundary as directed segments with
  // a known interior side (interior above for non-vertical segments).
  struct ResultSeg {
    IPt a, b;             // a precedes b in sweep order
    bool interior_above;  // meaningless when a.x == b.x
  };

  std::vector<ResultSeg> run(I64 rightbound) {
    std::vector<SweepEvent*> processed;
    StatusLine status;
    while (!queue_.empty()) {
      SweepEvent* ev = queue_.top();
      if (ev->p.x > rightbound) break;  // nothing further can intersect
      queue_.pop();
      processed.push_back(ev);
      if (ev->left) {
        auto [it, inserted] = status.insert(ev);
        assert(inserted);
        (void)inserted;
        iters_[ev->serial] = it;
        SweepEvent* prev = (it == status.begin()) ? nullptr : *std::prev(it);
        auto next_it = std::next(it);
        SweepEvent* next = (next_it == status.end()) ? nullptr : *next_it;
        compute_fields(ev, prev);
        if (next && possible_intersection(ev, next) == 2) {
          compute_fields(ev, prev);
          compute_fields(next, ev);
        }
        if (prev && possible_intersection(prev, ev) == 2) {
          auto prev_it = iters_[prev->serial];
          SweepEvent* prevprev = (prev_it == status.begin()) ? nullptr : *std::prev(prev_it);
          compute_fields(prev, prevprev);
          compute_fields(ev, prev);
        }
      } else {
        SweepEvent* le = ev->other;
        auto hit = iters_.find(le->serial);
        if (hit == iters_.end()) continue;
        auto it = hit->second;
        SweepEvent* prev = (it == status.begin()) ? nullptr : *std::prev(it);
        auto next_it = std::next(it);
        SweepEvent* next = (next_it == status.end()) ? nullptr : *next_it;
        status.erase(it);
        iters_.erase(hit);
        if (prev && next) possible_intersection(prev, next);
      }
    }

    std::vector<ResultSeg> out;
    for (SweepEvent* ev : processed) {
      if (ev->left && ev->in_result && !(ev->p == ev->other->p)) {
        out.push_back({ev->p, ev->other->p, !ev->in_out});
      }
    }
    return out;
  }

 private:
  SweepEvent* new_event(const IPt& p, bool left, bool subject) {
    events_.push_back(SweepEvent{});
    SweepEvent* e = &events_.back();
    e->p = p;
    e->left = left;
    e->subject = subject;
    e->serial = serial_++;
    return e;
  }

  void add_segment(const IPt& p0, const IPt& p1, bool subject) {
    SweepEvent* e0 = new_event(p0, true, subject);
    SweepEvent* e1 = new_event(p1, true, subject);
    e0->other = e1;
    e1->other = e0;
    if (compare_events(e0, e1) < 0)
      e1->left = false;
    else
      e0->left = false;
    queue_.push(e0);
    queue_.push(e1);
  }

  static bool in_result(const SweepEvent* ev) {
    switch (ev->kind) {
      case EdgeKind::Normal:
        return !ev->other_in_out;  // intersection keeps edges inside the other polygon
      case EdgeKind::SameTransition:
        return true;
      case EdgeKind::NonContributing:
      case EdgeKind::DifferentTransition:
        return false;
    }
    return false;
  }

  static void compute_fields(SweepEvent* ev, SweepEvent* prev) {
    if (!prev) {
      ev->in_out = false;
      ev->other_in_out = true;
    } else if (ev->subject == prev->subject) {
      ev->in_out = !prev->in_out;
      ev->other_in_out = prev->other_in_out;
    } else {
      ev->in_out = !prev->other_in_out;
      ev->other_in_out = prev->vertical() ? !prev->in_out : prev->in_out;
    }
    ev->in_result = in_result(ev);
  }

  void divide(SweepEvent* le, const IPt& p) {
    // le is a left event; p lies strictly inside its segment.
    SweepEvent* r = new_event(p, false, le->subject);
    SweepEvent* l = new_event(p, true, le->subject);
    r->other = le;
    l->other = le->other;
    if (compare_events(l, le->other) > 0) {
      // snapped point ordered past the right endpoint: swap the roles
      le->other->left = true;
      l->left = false;
    }
    le->other->other = l;
    le->other = r;
    queue_.push(l);
    queue_.push(r);
  }

  // Returns 0 (nothing), 1 (point crossing handled), 2 (overlap sharing the
  // left endpoint: caller must recompute fields), 3 (other overlap shapes).
  int possible_intersection(SweepEvent* se1, SweepEvent* se2) {
    SegInter inter = segment_intersection(se1->p, se1->other->p, se2->p, se2->other->p);
    if (inter.n == 0) return 0;
    if (inter.n == 1 && (se1->p == se2->p || se1->other->p == se2->other->p))
      return 0;  // segments only share an endpoint
    if (inter.n == 2 && se1->subject == se2->subject)
      return 0;  // identical edges within one input; resolved by parity later
    if (inter.n == 1) {
      if (!(se1->p == inter.p0) && !(se1->other->p == inter.p0)) divide(se1, inter.p0);
      if (!(se2->p == inter.p0) && !(se2->other->p == inter.p0)) divide(se2, inter.p0);
      return 1;
    }
    // cross-polygon collinear overlap
    std::vector<SweepEvent*> ev;
    bool left_co = false, right_co = false;
    if (se1->p == se2->p) {
      left_co = true;
    } else if (compare_events(se1, se2) > 0) {
      ev.push_back(se2);
      ev.push_back(se1);
    } else {
      ev.push_back(se1);
      ev.push_back(se2);
    }
    if (se1->other->p == se2->other->p) {
      right_co = true;
    } else if (compare_events(se1->other, se2->other) > 0) {
      ev.push_back(se2->other);
      ev.push_back(se1->other);
    } else {
      ev.push_back(se1->other);
      ev.push_back(se2->other);
    }

    if (left_co) {
      se2->kind = EdgeKind::NonContributing;
      se1->kind = (se1->in_out == se2->in_out) ? EdgeKind::SameTransition
                                               : EdgeKind::DifferentTransition;
      if (!right_co) divide(ev[1]->other, ev[0]->p);
      return 2;
    }
    if (right_co) {
      divide(ev[0], ev[1]->p);
      return 3;
    }
    if (ev[0] != ev[3]->other) {
      divide(ev[0], ev[1]->p);
      divide(ev[1], ev[2]->p);
      return 3;
    }
    // one segment fully contains the other
    divide(ev[0], ev[1]->p);
    divide(ev[3]->other, ev[2]->p);
    return 3;
  }

  std::deque<SweepEvent> events_;  // stable addresses
  std::priority_queue<SweepEvent*, std::vector<SweepEvent*>, QueueOrder> queue_;
  std::map<uint32_t, StatusLine::iterator> iters_;
  uint32_t serial_ = 0;
};

// ---------------------------------------------------------------------------
// Ring assembly: stitch the result segments into faces of the induced planar
// subdivision, keeping the result interior on the left of every directed
// edge. Counter-clockwise cycles become shells, clockwise ones holes.

struct HalfEdge {
  int tail = 0, head = 0;  // vertex ids
  int twin = 0;
  int pos_at_tail = 0;        // index in the tail vertex's sorted fan
  int8_t inside_left = -1;    // -1 unknown (vertical), 0/1 known
};

int half_plane(I64 dx, I64 dy) { return (dy < 0 || (dy == 0 && dx < 0)) ? 1 : 0; }

struct IntRing {
  std::vector<IPt> pts;  // closed: front == back
  I128 area2 = 0;        // twice the signed area
};

// Boundary-inclusive point-in-ring test, exact arithmetic.
bool ring_contains(const IntRing& ring, const IPt& q) {
  bool inside = false;
  for (size_t i = 0; i + 1 < ring.pts.size(); ++i) {
    const IPt& p1 = ring.pts[i];
    const IPt& p2 = ring.pts[i + 1];
    // on-segment check
    if (cross3(p1, p2, q) == 0 && std::min(p1.x, p2.x) <= q.x && q.x <= std::max(p1.x, p2.x) &&
        std::min(p1.y, p2.y) <= q.y && q.y <= std::max(p1.y, p2.y)) {
      return true;
    }
    if ((p1.y > q.y) != (p2.y > q.y)) {
      I128 det = (I128)(p2.x - p1.x) * (q.y - p1.y) - (I128)(p2.y - p1.y) * (q.x - p1.x);
      if ((det > 0) == (p2.y > p1.y)) inside = !inside;
    }
  }
  return inside;
}

MultiPolygon assemble(const std::vector<Sweep::ResultSeg>& raw) {
  // Parity cancellation: a boundary segment emitted twice is a zero-width
  // wall between coincident pieces and must dissolve.
  std::map<std::pair<IPt, IPt>, std::vector<const Sweep::ResultSeg*>> by_seg;
  for (const auto& s : raw) by_seg[{s.a, s.b}].push_back(&s);
  std::vector<Sweep::ResultSeg> segs;
  for (auto& [key, list] : by_seg) {
    if (list.size() % 2 == 1) segs.push_back(*list.front());
  }
  if (segs.empty()) return {};

  // vertex table
  std::map<IPt, int> vid;
  std::vector<IPt> verts;
  auto vertex = [&](const IPt& p) {
    auto [it, fresh] = vid.try_emplace(p, (int)verts.size());
    if (fresh) verts.push_back(p);
    return it->second;
  };

  std::vector<HalfEdge> hes;
  hes.reserve(segs.size() * 2);
  for (const auto& s : segs) {
    int va = vertex(s.a), vb = vertex(s.b);
    int i = (int)hes.size();
    HalfEdge fwd{va, vb, i + 1, 0, -1};
    HalfEdge rev{vb, va, i, 0, -1};
    if (s.a.x != s.b.x) {
      // a precedes b, so a -> b runs left to right: its left side is above.
      fwd.inside_left = s.interior_above ? 1 : 0;
      rev.inside_left = s.interior_above ? 0 : 1;
    }
    hes.push_back(fwd);
    hes.push_back(rev);
  }

  // angular fans per vertex
  std::vector<std::vector<int>> fan(verts.size());
  for (int i = 0; i < (int)hes.size(); ++i) fan[hes[i].tail].push_back(i);
  auto dir_less = [&](int i, int j) {
    const HalfEdge &a = hes[i], &b = hes[j];
    I64 ax = verts[a.head].x - verts[a.tail].x, ay = verts[a.head].y - verts[a.tail].y;
    I64 bx = verts[b.head].x - verts[b.tail].x, by = verts[b.head].y - verts[b.tail].y;
    int ha = half_plane(ax, ay), hb = half_plane(bx, by);
    if (ha != hb) return ha < hb;
    return (I128)ax * by - (I128)ay * bx > 0;
  };
  for (auto& f : fan) std::sort(f.begin(), f.end(), dir_less);
  for (auto& f : fan)
    for (int k = 0; k < (int)f.size(); ++k) hes[f[k]].pos_at_tail = k;

  // face traversal, interior kept on the left
  auto next_he = [&](int h) {
    const auto& f = fan[hes[h].head];
    int k = hes[hes[h].twin].pos_at_tail;
    return f[(k + (int)f.size() - 1) % f.size()];
  };

  std::vector<IntRing> shells, holes;
  std::vector<char> used(hes.size(), 0);
  for (int start = 0; start < (int)hes.size(); ++start) {
    if (used[start]) continue;
    IntRing ring;
    int inside = -1;
    int h = start;
    do {
      used[h] = 1;
      ring.pts.push_back(verts[hes[h].tail]);
      if (hes[h].inside_left >= 0) inside = hes[h].inside_left;
      h = next_he(h);
    } while (h != start && !used[h]);
    if (h != start) continue;  // defensive: malformed walk
    ring.pts.push_back(ring.pts.front());
    if (inside != 1) continue;  // not a result-side face, or degenerate
    for (size_t i = 0; i + 1 < ring.pts.size(); ++i)
      ring.area2 += (I128)ring.pts[i].x * ring.pts[i + 1].y - (I128)ring.pts[i + 1].x * ring.pts[i].y;
    if (ring.area2 == 0) continue;
    (ring.area2 > 0 ? shells : holes).push_back(std::move(ring));
  }

  // attach each hole to the smallest shell containing it
  std::vector<std::vector<const IntRing*>> shell_holes(shells.size());
  for (const IntRing& hole : holes) {
    int best = -1;
    for (int s = 0; s < (int)shells.size(); ++s) {
      if (!ring_contains(shells[s], hole.pts.front())) continue;
      if (best < 0 || shells[s].area2 < shells[best].area2) best = s;
    }
    if (best >= 0) shell_holes[best].push_back(&hole);
  }

  MultiPolygon out;
  auto to_ring = [](const IntRing& r) {
    Ring ring;
    ring.coords.reserve(r.pts.size());
    for (const IPt& p : r.pts) ring.coords.push_back({to_deg(p.x), to_deg(p.y)});
    return ring;
  };
  for (int s = 0; s < (int)shells.size(); ++s) {
    Polygon poly;
    poly.outer = to_ring(shells[s]);
    for (const IntRing* h : shell_holes[s]) poly.holes.push_back(to_ring(*h));
    out.parts.push_back(std::move(poly));
  }
  return out;
}

}  // namespace

MultiPolygon intersect(const MultiPolygon& a, const MultiPolygon& b) {
  try {
    validate(a);
    validate(b);
  } catch (const Error& e) {
    throw InvalidPolygon(e.what());
  }
  if (a.empty() || b.empty()) return {};
  Box ba = bounding_box(a), bb = bounding_box(b);
  if (!boxes_overlap(ba, bb)) return {};

  Sweep sweep;
  for (const Polygon& p : a.parts) {
    sweep.add_ring(p.outer.coords, true);
    for (const Ring& h : p.holes) sweep.add_ring(h.coords, true);
  }
  for (const Polygon& p : b.parts) {
    sweep.add_ring(p.outer.coords, false);
    for (const Ring& h : p.holes) sweep.add_ring(h.coords, false);
  }
  I64 rightbound = std::min(to_grid(ba.xmax), to_grid(bb.xmax));
  return assemble(sweep.run(rightbound));
}

}  // namespace ipcfuse::geom
