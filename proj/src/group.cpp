#include "group.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "errors.hpp"

namespace orbistrat {

namespace {

// Deterministic total order on isometries via integer-rounded entries.
std::vector<long long> canonical_key(const Isometry& g) {
  std::vector<long long> key;
  key.reserve(g.linear.size() + g.translation.size());
  for (int i = 0; i < g.linear.rows(); ++i) {
    for (int j = 0; j < g.linear.cols(); ++j) {
      key.push_back(std::llround(g.linear(i, j) * 1e7));
    }
  }
  for (int i = 0; i < g.translation.size(); ++i) {
    key.push_back(std::llround(g.translation(i) * 1e7));
  }
  return key;
}

// Bucketed dedup: rounded-entry hash plus tolerance-exact compare inside the
// bucket. Inputs keep distinct elements far apart relative to the 1e-6 grid.
struct ElementPool {
  std::unordered_map<std::uint64_t, std::vector<int>> buckets;
  std::vector<GroupElement> elements;
  double tol;

  explicit ElementPool(double t) : tol(t) {}

  static std::uint64_t hash_of(const Isometry& g) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](long long v) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    };
    for (int i = 0; i < g.linear.rows(); ++i) {
      for (int j = 0; j < g.linear.cols(); ++j) {
        mix(std::llround(g.linear(i, j) * 1e6));
      }
    }
    for (int i = 0; i < g.translation.size(); ++i) {
      mix(std::llround(g.translation(i) * 1e6));
    }
    return h;
  }

  int find(const Isometry& g) const {
    auto it = buckets.find(hash_of(g));
    if (it == buckets.end()) return -1;
    for (int idx : it->second) {
      if (approx_equal(elements[idx].iso, g, tol)) return idx;
    }
    return -1;
  }

  // Returns the element's index and whether it was newly inserted.
  std::pair<int, bool> insert(const GroupElement& e) {
    int existing = find(e.iso);
    if (existing >= 0) return {existing, false};
    int idx = static_cast<int>(elements.size());
    elements.push_back(e);
    buckets[hash_of(e.iso)].push_back(idx);
    return {idx, true};
  }
};

}  // namespace

GroupElement identity_element(int n) {
  return GroupElement{identity_isometry(n), {}};
}

GroupElement compose_elements(const GroupElement& a, const GroupElement& b) {
  GroupElement out{compose(a.iso, b.iso), a.word};
  out.word.insert(out.word.end(), b.word.begin(), b.word.end());
  return out;
}

GroupElement inverse_element(const GroupElement& a) {
  GroupElement out{inverse(a.iso), {}};
  out.word.reserve(a.word.size());
  for (auto it = a.word.rbegin(); it != a.word.rend(); ++it) {
    out.word.push_back(-*it);
  }
  return out;
}

Isometry evaluate_word(const std::vector<Isometry>& generators,
                       const std::vector<int>& word) {
  if (generators.empty()) fail(ErrorKind::Validation, "evaluate_word: no generators");
  Isometry acc = identity_isometry(generators[0].dimension());
  for (int letter : word) {
    const int idx = std::abs(letter) - 1;
    if (idx < 0 || idx >= static_cast<int>(generators.size())) {
      fail(ErrorKind::Validation, "evaluate_word: letter out of range");
    }
    acc = compose(acc, letter > 0 ? generators[idx] : inverse(generators[idx]));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// FiniteGroup

FiniteGroup FiniteGroup::closure(std::vector<GroupElement> seeds, double tol,
                                 int cap) {
  if (seeds.empty()) fail(ErrorKind::Validation, "closure: empty seed set");
  const int n = seeds[0].iso.dimension();

  std::vector<GroupElement> elems;
  auto find = [&](const Isometry& g) {
    for (size_t i = 0; i < elems.size(); ++i) {
      if (approx_equal(elems[i].iso, g, tol)) return static_cast<int>(i);
    }
    return -1;
  };
  auto add = [&](const GroupElement& e) {
    if (find(e.iso) >= 0) return false;
    elems.push_back(e);
    return true;
  };

  add(identity_element(n));
  for (const GroupElement& s : seeds) add(s);
  for (const GroupElement& s : seeds) add(inverse_element(s));

  bool changed = true;
  while (changed) {
    changed = false;
    const size_t frozen = elems.size();
    for (size_t i = 0; i < frozen; ++i) {
      for (size_t j = 0; j < frozen; ++j) {
        GroupElement p = compose_elements(elems[i], elems[j]);
        if (add(p)) changed = true;
        if (static_cast<int>(elems.size()) > cap) {
          fail(ErrorKind::Enumeration,
               "finite closure exceeded the element cap (" +
                   std::to_string(cap) + "); group is not finite at this point");
        }
      }
    }
  }

  // Canonical order: identity first, the rest by rounded-entry key.
  std::stable_sort(elems.begin() + 1, elems.end(),
                   [](const GroupElement& a, const GroupElement& b) {
                     return canonical_key(a.iso) < canonical_key(b.iso);
                   });

  FiniteGroup g;
  g.tol_ = tol;
  g.elems_ = std::move(elems);
  const int order = g.order();
  g.mult_.assign(order, std::vector<int>(order, -1));
  g.inv_.assign(order, -1);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) {
      Isometry p = compose(g.elems_[i].iso, g.elems_[j].iso);
      int k = g.index_of(p, tol);
      if (k < 0) fail(ErrorKind::Internal, "closure: product left the set");
      g.mult_[i][j] = k;
      if (k == 0) g.inv_[i] = j;
    }
  }
  for (int i = 0; i < order; ++i) {
    if (g.inv_[i] < 0) fail(ErrorKind::Internal, "closure: missing inverse");
  }
  return g;
}

int FiniteGroup::dimension() const {
  return elems_.empty() ? 0 : elems_[0].iso.dimension();
}

int FiniteGroup::index_of(const Isometry& iso, double tol) const {
  for (size_t i = 0; i < elems_.size(); ++i) {
    if (approx_equal(elems_[i].iso, iso, tol)) return static_cast<int>(i);
  }
  return -1;
}

int FiniteGroup::element_order(int i) const {
  int acc = i;
  int k = 1;
  while (acc != 0) {
    acc = mult_[acc][i];
    ++k;
    if (k > order()) fail(ErrorKind::Internal, "element_order: not periodic");
  }
  return k;
}

// ---------------------------------------------------------------------------
// Subgroup lattice over bitmasks (parent order <= 48 fits in 64 bits).

namespace {

using Mask = std::uint64_t;

Mask generated_subgroup(const FiniteGroup& g, Mask seed) {
  Mask mask = seed | 1ull;  // identity is index 0
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < g.order(); ++i) {
      if (!(mask >> i & 1ull)) continue;
      for (int j = 0; j < g.order(); ++j) {
        if (!(mask >> j & 1ull)) continue;
        const int k = g.multiply(i, j);
        if (!(mask >> k & 1ull)) {
          mask |= 1ull << k;
          changed = true;
        }
      }
    }
  }
  return mask;
}

Mask conjugate_mask(const FiniteGroup& g, Mask mask, int by) {
  Mask out = 0;
  const int inv = g.inverse_index(by);
  for (int i = 0; i < g.order(); ++i) {
    if (mask >> i & 1ull) {
      out |= 1ull << g.multiply(g.multiply(by, i), inv);
    }
  }
  return out;
}

std::vector<int> mask_to_indices(Mask mask, int order) {
  std::vector<int> out;
  for (int i = 0; i < order; ++i) {
    if (mask >> i & 1ull) out.push_back(i);
  }
  return out;
}

Mask indices_to_mask(const std::vector<int>& indices) {
  Mask mask = 0;
  for (int i : indices) mask |= 1ull << i;
  return mask;
}

}  // namespace

std::vector<SubgroupRecord> subgroups(const FiniteGroup& g) {
  if (g.order() > 48) {
    fail(ErrorKind::Validation,
         "subgroups: exhaustive enumeration supports order <= 48, got " +
             std::to_string(g.order()));
  }
  std::set<Mask> known;
  known.insert(1ull);  // trivial subgroup
  // Every subgroup arises from a smaller one by adjoining one element, so
  // repeated single-element extensions reach the full lattice.
  std::deque<Mask> work(known.begin(), known.end());
  while (!work.empty()) {
    const Mask base = work.front();
    work.pop_front();
    for (int e = 1; e < g.order(); ++e) {
      if (base >> e & 1ull) continue;
      const Mask grown = generated_subgroup(g, base | (1ull << e));
      if (known.insert(grown).second) work.push_back(grown);
    }
  }

  // Conjugacy classes, canonically keyed by the smallest mask in the orbit.
  std::map<Mask, Mask> class_key;
  for (Mask mask : known) {
    Mask least = mask;
    for (int e = 0; e < g.order(); ++e) {
      least = std::min(least, conjugate_mask(g, mask, e));
    }
    class_key[mask] = least;
  }
  std::vector<Mask> class_order;
  for (const auto& [mask, key] : class_key) {
    if (std::find(class_order.begin(), class_order.end(), key) ==
        class_order.end()) {
      class_order.push_back(key);
    }
  }
  std::sort(class_order.begin(), class_order.end(),
            [](Mask a, Mask b) {
              const int pa = std::popcount(a), pb = std::popcount(b);
              return pa != pb ? pa < pb : a < b;
            });

  std::vector<SubgroupRecord> records;
  for (Mask mask : known) {
    SubgroupRecord rec;
    rec.members = mask_to_indices(mask, g.order());
    rec.order = static_cast<int>(rec.members.size());
    Mask norm = 0;
    for (int e = 0; e < g.order(); ++e) {
      if (conjugate_mask(g, mask, e) == mask) norm |= 1ull << e;
    }
    rec.normalizer = mask_to_indices(norm, g.order());
    rec.conjugacy_class_id = static_cast<int>(
        std::find(class_order.begin(), class_order.end(), class_key[mask]) -
        class_order.begin());
    records.push_back(std::move(rec));
  }
  std::sort(records.begin(), records.end(),
            [](const SubgroupRecord& a, const SubgroupRecord& b) {
              if (a.order != b.order) return a.order < b.order;
              return indices_to_mask(a.members) < indices_to_mask(b.members);
            });
  return records;
}

std::vector<int> normalizer(const FiniteGroup& g,
                            const std::vector<int>& subgroup) {
  const Mask mask = indices_to_mask(subgroup);
  std::vector<int> out;
  for (int e = 0; e < g.order(); ++e) {
    if (conjugate_mask(g, mask, e) == mask) out.push_back(e);
  }
  return out;
}

bool are_conjugate(const FiniteGroup& g, const std::vector<int>& h1,
                   const std::vector<int>& h2) {
  const Mask m1 = indices_to_mask(h1);
  const Mask m2 = indices_to_mask(h2);
  for (int e = 0; e < g.order(); ++e) {
    if (conjugate_mask(g, m1, e) == m2) return true;
  }
  return false;
}

std::vector<Mat> linearize_at(const FiniteGroup& h, const Vec& x, double tol) {
  std::vector<Mat> out;
  out.reserve(h.order());
  for (const GroupElement& e : h.elements()) {
    if ((apply(e.iso, x) - x).norm() > tol) {
      fail(ErrorKind::Validation,
           "linearize_at: an element does not fix the base point");
    }
    out.push_back(e.iso.linear);
  }
  return out;
}

bool conjugates_group(const Isometry& delta, const FiniteGroup& a,
                      const FiniteGroup& b, double tol) {
  if (a.order() != b.order()) return false;
  const Isometry delta_inv = inverse(delta);
  for (const GroupElement& e : a.elements()) {
    Isometry conj = compose(delta, compose(e.iso, delta_inv));
    if (b.index_of(conj, tol) < 0) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// GroupIndex

GroupIndex::GroupIndex(GeneratedGroup group, double tol)
    : group_(std::move(group)), tol_(tol) {
  validate();
  if (group_.lattice_basis.has_value()) {
    has_lattice_ = true;
    build_cosets();
  }
}

void GroupIndex::validate() {
  const int n = group_.dimension;
  if (n <= 0) fail(ErrorKind::Validation, "group dimension must be positive");
  if (group_.generators.empty()) {
    fail(ErrorKind::Validation, "group has no generators");
  }
  if (group_.max_word_length < 1 || group_.element_cap < 1) {
    fail(ErrorKind::Validation,
         "enumeration budgets must be at least 1 (max_word_length, "
         "element_cap)");
  }
  for (size_t i = 0; i < group_.generators.size(); ++i) {
    const Isometry& g = group_.generators[i];
    if (g.linear.rows() != n || g.linear.cols() != n ||
        g.translation.size() != n) {
      fail(ErrorKind::Validation,
           "generator " + std::to_string(i) + " has inconsistent dimensions");
    }
    if (!is_orthogonal(g.linear, 1e-7)) {
      fail(ErrorKind::Validation,
           "generator " + std::to_string(i) +
               " violates the orthogonality invariant");
    }
  }
  if (!group_.lattice_basis.has_value()) return;

  const auto& basis = *group_.lattice_basis;
  if (static_cast<int>(basis.size()) != n) {
    fail(ErrorKind::Validation,
         "lattice basis must contain exactly dimension-many vectors");
  }
  lattice_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    if (basis[i].size() != n) {
      fail(ErrorKind::Validation, "lattice basis vector has wrong dimension");
    }
    lattice_.col(i) = basis[i];
  }
  Eigen::JacobiSVD<Mat> svd(lattice_);
  if (svd.singularValues().minCoeff() <= kRankCutoff) {
    fail(ErrorKind::Validation, "lattice basis is singular");
  }
  lattice_inv_ = lattice_.inverse();

  for (size_t i = 0; i < group_.generators.size(); ++i) {
    Mat c = lattice_inv_ * group_.generators[i].linear * lattice_;
    Mat rounded = c.array().round().matrix();
    if ((c - rounded).cwiseAbs().maxCoeff() > 1e-7) {
      fail(ErrorKind::Validation,
           "generator " + std::to_string(i) +
               " does not preserve the declared lattice");
    }
    if (std::abs(std::abs(rounded.determinant()) - 1.0) > 1e-7) {
      fail(ErrorKind::Validation,
           "generator " + std::to_string(i) +
               " maps the lattice to a proper sublattice");
    }
  }

  basis_generator_.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (size_t j = 0; j < group_.generators.size() && basis_generator_[i] == 0;
         ++j) {
      const Isometry& g = group_.generators[j];
      if ((g.linear - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > tol_) {
        continue;
      }
      if ((g.translation - basis[i]).norm() <= tol_) {
        basis_generator_[i] = static_cast<int>(j) + 1;
      } else if ((g.translation + basis[i]).norm() <= tol_) {
        basis_generator_[i] = -(static_cast<int>(j) + 1);
      }
    }
    if (basis_generator_[i] == 0) {
      fail(ErrorKind::Validation,
           "lattice basis vector " + std::to_string(i) +
               " must appear among the generator translations");
    }
  }
}

namespace {

// Fractional part in [0, 1) with a snap so values a hair under 1 reduce to 0.
double unit_frac(double c) {
  double f = c - std::floor(c);
  if (f > 1.0 - 1e-7) f = 0.0;
  return f;
}

}  // namespace

void GroupIndex::build_cosets() {
  const int n = group_.dimension;
  auto reduce = [&](const GroupElement& e) {
    Vec c = lattice_inv_ * e.iso.translation;
    Vec f(n);
    std::vector<long> m(n);
    for (int i = 0; i < n; ++i) {
      f(i) = unit_frac(c(i));
      m[i] = std::lround(c(i) - f(i));
    }
    GroupElement reduced{Isometry{e.iso.linear, lattice_ * f}, {}};
    std::vector<long> neg(n);
    for (int i = 0; i < n; ++i) neg[i] = -m[i];
    reduced.word = lattice_translation_word(neg);
    reduced.word.insert(reduced.word.end(), e.word.begin(), e.word.end());
    return reduced;
  };

  ElementPool pool(tol_);
  pool.insert(reduce(identity_element(n)));
  std::deque<int> work{0};
  constexpr int kCosetCap = 4096;
  while (!work.empty()) {
    const GroupElement current = pool.elements[work.front()];
    work.pop_front();
    for (size_t j = 0; j < group_.generators.size(); ++j) {
      for (int sign : {+1, -1}) {
        GroupElement step{
            sign > 0 ? group_.generators[j] : inverse(group_.generators[j]),
            {sign * (static_cast<int>(j) + 1)}};
        auto [idx, inserted] = pool.insert(reduce(compose_elements(current, step)));
        if (inserted) work.push_back(idx);
        if (static_cast<int>(pool.elements.size()) > kCosetCap) {
          fail(ErrorKind::Enumeration,
               "coset enumeration exceeded its cap; the linear parts do not "
               "close into a finite point group");
        }
      }
    }
  }

  cosets_ = pool.elements;
  std::stable_sort(cosets_.begin() + 1, cosets_.end(),
                   [](const GroupElement& a, const GroupElement& b) {
                     return canonical_key(a.iso) < canonical_key(b.iso);
                   });
}

std::vector<int> GroupIndex::lattice_translation_word(
    const std::vector<long>& m) const {
  std::vector<int> word;
  for (size_t i = 0; i < m.size(); ++i) {
    const int letter = m[i] > 0 ? basis_generator_[i] : -basis_generator_[i];
    for (long k = 0; k < std::abs(m[i]); ++k) word.push_back(letter);
  }
  return word;
}

BallEnumeration GroupIndex::enumerate_ball(const Vec& center,
                                           double radius) const {
  return has_lattice_ ? enumerate_ball_lattice(center, radius)
                      : enumerate_ball_bfs(center, radius);
}

BallEnumeration GroupIndex::enumerate_ball_lattice(const Vec& center,
                                                   double radius) const {
  const int n = group_.dimension;
  BallEnumeration out;
  out.complete = true;

  std::vector<double> row_norms(n);
  for (int i = 0; i < n; ++i) row_norms[i] = lattice_inv_.row(i).norm();

  for (const GroupElement& rep : cosets_) {
    const Vec target = center - rep.iso.linear * center - rep.iso.translation;
    const Vec mc = lattice_inv_ * target;
    std::vector<long> lo(n), hi(n), m(n);
    bool empty = false;
    for (int i = 0; i < n; ++i) {
      const double ext = radius * row_norms[i] + 1e-9;
      lo[i] = static_cast<long>(std::ceil(mc(i) - ext - 1e-9));
      hi[i] = static_cast<long>(std::floor(mc(i) + ext + 1e-9));
      m[i] = lo[i];
      if (lo[i] > hi[i]) empty = true;
    }
    if (empty) continue;
    for (;;) {
      Vec shift(n);
      for (int i = 0; i < n; ++i) shift(i) = static_cast<double>(m[i]);
      const Vec translation = lattice_ * shift;
      if ((translation - target).norm() <= radius + tol_) {
        GroupElement e{Isometry{rep.iso.linear, rep.iso.translation + translation},
                       lattice_translation_word(m)};
        e.word.insert(e.word.end(), rep.word.begin(), rep.word.end());
        out.elements.push_back(std::move(e));
        if (static_cast<int>(out.elements.size()) > group_.element_cap) {
          fail(ErrorKind::Enumeration,
               "ball enumeration exceeded the element cap");
        }
      }
      int axis = 0;
      while (axis < n) {
        if (++m[axis] <= hi[axis]) break;
        m[axis] = lo[axis];
        ++axis;
      }
      if (axis == n) break;
    }
  }

  std::stable_sort(out.elements.begin(), out.elements.end(),
                   [](const GroupElement& a, const GroupElement& b) {
                     return canonical_key(a.iso) < canonical_key(b.iso);
                   });
  return out;
}

BallEnumeration GroupIndex::enumerate_ball_bfs(const Vec& center,
                                               double radius) const {
  const int n = group_.dimension;
  std::vector<GroupElement> symbols;
  for (size_t j = 0; j < group_.generators.size(); ++j) {
    symbols.push_back(
        GroupElement{group_.generators[j], {static_cast<int>(j) + 1}});
    symbols.push_back(GroupElement{inverse(group_.generators[j]),
                                   {-(static_cast<int>(j) + 1)}});
  }
  double max_step = 0.0;
  for (const GroupElement& s : symbols) {
    max_step = std::max(max_step, (apply(s.iso, center) - center).norm());
  }

  ElementPool pool(tol_);
  pool.insert(identity_element(n));
  std::vector<int> frontier{0};
  std::vector<int> last_level;
  for (int level = 1; level <= group_.max_word_length; ++level) {
    std::vector<int> next;
    for (int idx : frontier) {
      const GroupElement current = pool.elements[idx];
      for (const GroupElement& s : symbols) {
        auto [at, inserted] = pool.insert(compose_elements(current, s));
        if (inserted) {
          next.push_back(at);
          if (static_cast<int>(pool.elements.size()) > group_.element_cap) {
            fail(ErrorKind::Enumeration,
                 "word enumeration exceeded the element cap (suspected "
                 "non-discrete or non-proper input)");
          }
        }
      }
    }
    frontier = std::move(next);
    if (level == group_.max_word_length) last_level = frontier;
    if (frontier.empty()) break;  // group exhausted: closure reached
  }

  BallEnumeration out;
  out.complete = true;
  for (int idx : last_level) {
    const double d = (apply(pool.elements[idx].iso, center) - center).norm();
    if (d <= radius + 2.0 * max_step) {
      out.complete = false;
      break;
    }
  }
  for (const GroupElement& e : pool.elements) {
    if ((apply(e.iso, center) - center).norm() <= radius + tol_) {
      out.elements.push_back(e);
    }
  }
  std::stable_sort(out.elements.begin(), out.elements.end(),
                   [](const GroupElement& a, const GroupElement& b) {
                     return canonical_key(a.iso) < canonical_key(b.iso);
                   });
  return out;
}

std::vector<GroupElement> GroupIndex::enumerate_words(int max_len) const {
  ElementPool pool(tol_);
  pool.insert(identity_element(group_.dimension));
  std::vector<int> frontier{0};
  for (int level = 1; level <= max_len && !frontier.empty(); ++level) {
    std::vector<int> next;
    for (int idx : frontier) {
      const GroupElement current = pool.elements[idx];
      for (size_t j = 0; j < group_.generators.size(); ++j) {
        for (int sign : {+1, -1}) {
          GroupElement step{
              sign > 0 ? group_.generators[j] : inverse(group_.generators[j]),
              {sign * (static_cast<int>(j) + 1)}};
          auto [at, inserted] = pool.insert(compose_elements(current, step));
          if (inserted) next.push_back(at);
          if (static_cast<int>(pool.elements.size()) > group_.element_cap) {
            fail(ErrorKind::Enumeration,
                 "word enumeration exceeded the element cap");
          }
        }
      }
    }
    frontier = std::move(next);
  }
  return pool.elements;
}

FiniteGroup GroupIndex::isotropy_at(const Vec& x) const {
  std::vector<GroupElement> fixers;
  if (has_lattice_) {
    const int n = group_.dimension;
    for (const GroupElement& rep : cosets_) {
      const Vec target = x - rep.iso.linear * x - rep.iso.translation;
      const Vec mc = lattice_inv_ * target;
      std::vector<long> m(n);
      Vec shift(n);
      for (int i = 0; i < n; ++i) {
        m[i] = std::lround(mc(i));
        shift(i) = static_cast<double>(m[i]);
      }
      if ((lattice_ * shift - target).norm() <= tol_) {
        GroupElement e{
            Isometry{rep.iso.linear, rep.iso.translation + lattice_ * shift},
            lattice_translation_word(m)};
        e.word.insert(e.word.end(), rep.word.begin(), rep.word.end());
        fixers.push_back(std::move(e));
      }
    }
  } else {
    for (const GroupElement& e : enumerate_ball(x, tol_).elements) {
      fixers.push_back(e);
    }
  }
  return FiniteGroup::closure(std::move(fixers), tol_);
}

PropernessCertificate GroupIndex::properness_check(const Vec& lo,
                                                   const Vec& hi) const {
  const int n = group_.dimension;
  const Vec center = 0.5 * (lo + hi);
  const double half_diag = 0.5 * (hi - lo).norm();

  BallEnumeration ball = enumerate_ball(center, 2.0 * half_diag + 1e-6);
  if (!ball.complete) {
    fail(ErrorKind::Enumeration,
         "properness check failed: the word budget cannot separate the "
         "frontier from the box (non-proper action or budget too small)");
  }

  auto clamp_box = [&](Vec v) {
    for (int i = 0; i < n; ++i) v(i) = std::clamp(v(i), lo(i), hi(i));
    return v;
  };

  PropernessCertificate cert;
  cert.complete = true;
  cert.elements_inspected = static_cast<int>(ball.elements.size());
  for (const GroupElement& e : ball.elements) {
    // Distance between the box and its image under e via alternating
    // projections (both sets are convex; projections are exact).
    const Isometry inv_e = inverse(e.iso);
    Vec p = clamp_box(center);
    Vec q = p;
    double gap = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      q = apply(e.iso, clamp_box(apply(inv_e, p)));
      Vec next_p = clamp_box(q);
      const double change = (next_p - p).norm();
      p = next_p;
      gap = (p - q).norm();
      if (gap <= 1e-9 || change <= 1e-12) break;
    }
    if (gap <= 1e-7) cert.meeting_elements.push_back(e);
  }
  return cert;
}

}  // namespace orbistrat
