#pragma once

// Finitely generated groups of Euclidean isometries: ball enumeration with
// witness words, isotropy groups, a properness certificate for a compact box,
// and finite-group structure (subgroup lattice, normalizers, conjugacy).

#include <cstdint>
#include <optional>
#include <vector>

#include "geometry.hpp"

namespace orbistrat {

// A group element together with a word in the declared generators that
// evaluates to it: 1-based indices, negative for the inverse generator,
// rightmost letter applied first. The identity carries the empty word.
struct GroupElement {
  Isometry iso;
  std::vector<int> word;
};

struct GeneratedGroup {
  int dimension = 0;
  std::vector<Isometry> generators;
  // Basis of the translation subgroup, when declared; enables analytic
  // translation handling (each basis vector must appear among the
  // generators, up to sign, so witness words stay well-formed).
  std::optional<std::vector<Vec>> lattice_basis;
  int max_word_length = 8;
  int element_cap = 10000;
  double enumeration_radius = 0.0;  // 0 means callers derive one
};

GroupElement identity_element(int n);
GroupElement compose_elements(const GroupElement& a, const GroupElement& b);
GroupElement inverse_element(const GroupElement& a);
Isometry evaluate_word(const std::vector<Isometry>& generators,
                       const std::vector<int>& word);

struct BallEnumeration {
  std::vector<GroupElement> elements;
  // True when the result provably lists every element moving the center by
  // at most the radius (analytic lattice handling, or every maximal-length
  // frontier word already displaces the center beyond radius plus twice the
  // largest generator displacement).
  bool complete = false;
};

struct PropernessCertificate {
  std::vector<GroupElement> meeting_elements;  // {g : g.box intersects box}
  bool complete = false;
  int elements_inspected = 0;
};

// ---------------------------------------------------------------------------
// Finite groups with index-based multiplication tables.

class FiniteGroup {
 public:
  FiniteGroup() = default;
  // Closes the seed set under composition and inversion (capped), verifies
  // the result, and builds the tables. Identity is always index 0.
  static FiniteGroup closure(std::vector<GroupElement> seeds, double tol,
                             int cap = 512);

  int order() const { return static_cast<int>(elems_.size()); }
  int dimension() const;
  double tolerance() const { return tol_; }
  const GroupElement& element(int i) const { return elems_[i]; }
  const std::vector<GroupElement>& elements() const { return elems_; }
  int multiply(int i, int j) const { return mult_[i][j]; }
  int inverse_index(int i) const { return inv_[i]; }
  int index_of(const Isometry& iso, double tol) const;
  int element_order(int i) const;

 private:
  std::vector<GroupElement> elems_;
  std::vector<std::vector<int>> mult_;
  std::vector<int> inv_;
  double tol_ = kDefaultTolerance;
};

struct SubgroupRecord {
  std::vector<int> members;     // sorted element indices into the parent
  std::vector<int> normalizer;  // sorted element indices into the parent
  int order = 0;
  int conjugacy_class_id = 0;   // subgroups conjugate in the parent share it
};

// Exhaustive subgroup lattice; parent order capped at 48.
std::vector<SubgroupRecord> subgroups(const FiniteGroup& g);
std::vector<int> normalizer(const FiniteGroup& g,
                            const std::vector<int>& subgroup);
bool are_conjugate(const FiniteGroup& g, const std::vector<int>& h1,
                   const std::vector<int>& h2);
// Linear parts of a point stabilizer at its fixed point (conjugated so the
// point is the origin); errors if some element does not fix x.
std::vector<Mat> linearize_at(const FiniteGroup& h, const Vec& x, double tol);
// Does conjugation by delta carry group a onto group b elementwise?
bool conjugates_group(const Isometry& delta, const FiniteGroup& a,
                      const FiniteGroup& b, double tol);

// ---------------------------------------------------------------------------
// Enumeration engine. Validates the group on construction, precomputes coset
// representatives when a lattice is declared, and serves ball queries.

class GroupIndex {
 public:
  GroupIndex(GeneratedGroup group, double tol);

  const GeneratedGroup& group() const { return group_; }
  double tolerance() const { return tol_; }
  bool has_lattice() const { return has_lattice_; }
  int coset_count() const { return static_cast<int>(cosets_.size()); }

  // Distinct elements g with |g.center - center| <= radius.
  BallEnumeration enumerate_ball(const Vec& center, double radius) const;
  // Distinct elements with witness words of length <= max_len, in BFS
  // discovery order (generators first).
  std::vector<GroupElement> enumerate_words(int max_len) const;
  // Stabilizer of a point as a finite group.
  FiniteGroup isotropy_at(const Vec& x) const;
  // Certificate that only finitely many elements move the box [lo, hi] onto
  // something meeting it; throws ErrorKind::Enumeration when the word budget
  // cannot separate the frontier or the element cap is hit.
  PropernessCertificate properness_check(const Vec& lo, const Vec& hi) const;

 private:
  void validate();
  void build_cosets();
  std::vector<int> lattice_translation_word(const std::vector<long>& m) const;
  BallEnumeration enumerate_ball_lattice(const Vec& center,
                                         double radius) const;
  BallEnumeration enumerate_ball_bfs(const Vec& center, double radius) const;

  GeneratedGroup group_;
  double tol_ = kDefaultTolerance;
  bool has_lattice_ = false;
  Mat lattice_;      // basis vectors as columns
  Mat lattice_inv_;
  // Signed generator id whose translation equals (sign times) basis vector i.
  std::vector<int> basis_generator_;
  std::vector<GroupElement> cosets_;  // reduced representatives, identity first
};

}  // namespace orbistrat
