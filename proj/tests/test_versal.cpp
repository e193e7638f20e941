#include "doctest.h"

#include "germlab/detect.hpp"
#include "germlab/errors.hpp"
#include "germlab/versal.hpp"

#include <initializer_list>
#include <utility>
#include <vector>

using namespace germlab;

namespace {

JetQ poly(int nu, int n, const std::vector<std::pair<MultiIndex, Rat>>& terms,
          Parity parity = Parity::general) {
  return jet_from_coeffs<Rat>(nu, n, terms, parity);
}

template <class F>
errc code_of(F&& body) {
  try {
    body();
  } catch (const error& e) {
    return e.code();
  }
  return errc::io_error;  // sentinel: nothing was thrown
}

std::vector<Rat> rats(std::initializer_list<long> xs) {
  std::vector<Rat> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

SingularityLabel mk_label(Family fam, int index, int s1 = 0, int s2 = 0) {
  SingularityLabel lab;
  lab.family = fam;
  lab.index = index;
  lab.sign1 = s1;
  lab.sign2 = s2;
  ClassMetadata md = catalogue_metadata(lab);
  lab.mult = md.mult;
  lab.codim = md.codim;
  lab.beta = md.beta;
  lab.modality = md.modality;
  return lab;
}

SingularityLabel mk_xe(int index, int s1, int s2, const Rat& a) {
  SingularityLabel lab;
  lab.family = Family::x_e;
  lab.index = index;
  lab.sign1 = s1;
  lab.sign2 = s2;
  lab.has_modulus = true;
  lab.modulus = ScalarReport::from_rat(a);
  ClassMetadata md = catalogue_metadata(lab);
  lab.mult = md.mult;
  lab.codim = md.codim;
  lab.beta = md.beta;
  lab.modality = md.modality;
  return lab;
}

}  // namespace

TEST_CASE("single line test vectors with a regular variable eliminated") {
  // y^4 + y^2 z + z^2 deformed by y and y^2 + z
  JetQ base = poly(2, 4, {{{0, 4}, 1}, {{2, 1}, 1}, {{0, 2}, 1}});
  JetQ g1 = poly(2, 4, {{{1, 0}, 1}});
  JetQ g2 = poly(2, 4, {{{2, 0}, 1}, {{0, 1}, 1}});
  auto dj = make_deformation(base, {g1, g2});

  auto v = v_seq(dj, 3);
  CHECK(v[0] == rats({1, 0}));
  CHECK(v[1] == rats({0, 1}));  // the z elimination folds in the cross term

  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::a);
  REQUIRE(lab.index == 3);
  auto rep = versality_check(dj, lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 2);
  CHECK(rep.min_parameters == 2);
  CHECK(rep.combined_test_set.size() == 2);
  CHECK(rep.combined_test_set[0].first == "v_2");
}

TEST_CASE("even single line test vectors for a pure power") {
  // x^8 deformed by x^6, x^4, x^2
  JetQ base = poly(1, 8, {{{8}, 1}}, Parity::even);
  auto dj = make_deformation(
      base, {poly(1, 8, {{{6}, 1}}, Parity::even), poly(1, 8, {{{4}, 1}}, Parity::even),
             poly(1, 8, {{{2}, 1}}, Parity::even)});

  auto v = v_e_seq(dj, 4);
  CHECK(v[0] == rats({0, 0, 2}));
  CHECK(v[1] == rats({0, 24, 0}));
  CHECK(v[2] == rats({720, 0, 0}));

  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::a_e);
  REQUIRE(lab.index == 4);
  auto rep = versality_check(dj, lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 3);
  CHECK(rep.vectors.size() == 3);
  CHECK(rep.vectors[1].first == "v_e_3");
}

TEST_CASE("missing directions give not_versal") {
  // k^4 deformed by k^2 alone: rank 1 of 2
  JetQ base = poly(1, 4, {{{4}, 1}});
  auto dj = make_deformation(base, {poly(1, 4, {{{2}, 1}})});
  auto rep = versality_check(dj, mk_label(Family::a, 3, 1));
  CHECK(rep.verdict == Verdict::not_versal);
  CHECK(rep.rank == 1);
  CHECK(rep.min_parameters == 2);

  // collinear directions never help
  JetQ b6 = poly(1, 6, {{{6}, 1}});
  auto dj2 = make_deformation(b6, {poly(1, 6, {{{2}, 1}}), poly(1, 6, {{{2}, 3}})});
  auto rep2 = versality_check(dj2, mk_label(Family::a, 5, 1));
  CHECK(rep2.verdict == Verdict::not_versal);
  CHECK(rep2.rank == 1);
}

TEST_CASE("double line test vectors") {
  // x^2 y + y^4 deformed by x, y, y^2, x^2
  JetQ base = poly(2, 4, {{{2, 1}, 1}, {{0, 4}, 1}});
  std::vector<JetQ> dirs = {poly(2, 4, {{{1, 0}, 1}}), poly(2, 4, {{{0, 1}, 1}}),
                            poly(2, 4, {{{0, 2}, 1}}), poly(2, 4, {{{2, 0}, 1}})};
  auto dj = make_deformation(base, dirs);

  auto wv = w_seq(dj, 5);
  CHECK(wv.c == Rat(1));
  CHECK(wv.w[0] == rats({0, 0, 0, 2}));  // w_1
  CHECK(wv.w[1] == rats({1, 0, 0, 0}));  // w_2
  CHECK(wv.w[2] == rats({0, 1, 0, 0}));  // w_3
  CHECK(wv.w[3] == rats({0, 0, 2, 0}));  // w_4
  CHECK(wv.w[4] == rats({0, 0, 0, 0}));  // w_5
  CHECK(wv.d[4] == Rat(24));

  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::d);
  REQUIRE(lab.index == 5);
  auto rep = versality_check(dj, lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 4);
  CHECK(rep.combined_test_set.size() == 4);
  // the last combination picks up the w_1 correction
  CHECK(rep.combined_test_set[3].second == rats({0, 0, 0, -24}));

  // dropping the x^2 direction kills the corrected vector
  auto dj3 = make_deformation(base, {dirs[0], dirs[1], dirs[2]});
  auto rep3 = versality_check(dj3, lab);
  CHECK(rep3.verdict == Verdict::not_versal);
  CHECK(rep3.rank == 3);
}

TEST_CASE("three parameters suffice one step down the double line") {
  // x^2 y + y^3 deformed by x, y, y^2
  JetQ base = poly(2, 3, {{{2, 1}, 1}, {{0, 3}, 1}});
  auto dj = make_deformation(base, {poly(2, 3, {{{1, 0}, 1}}), poly(2, 3, {{{0, 1}, 1}}),
                                    poly(2, 3, {{{0, 2}, 1}})});
  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::d);
  REQUIRE(lab.index == 4);
  auto rep = versality_check(dj, lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 3);
  // w_4 gets a w_1 correction with weight d_4 / (2c) = 3, invisible here
  CHECK(rep.combined_test_set[2].second == rats({0, 0, 2}));
}

TEST_CASE("double line verdicts survive a shear of the presentation") {
  // x -> x + 2 y^2 applied to the versal pair above, truncated at order 4
  JetQ base = poly(2, 4, {{{2, 1}, 1}, {{1, 3}, 4}, {{0, 4}, 1}});
  std::vector<JetQ> dirs = {
      poly(2, 4, {{{1, 0}, 1}, {{0, 2}, 2}}),                  // x + 2y^2
      poly(2, 4, {{{0, 1}, 1}}),                               // y
      poly(2, 4, {{{0, 2}, 1}}),                               // y^2
      poly(2, 4, {{{2, 0}, 1}, {{1, 2}, 4}, {{0, 4}, 4}}),     // (x + 2y^2)^2
  };
  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::d);
  REQUIRE(lab.index == 5);

  auto rep = versality_check(make_deformation(base, dirs), lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 4);

  auto rep3 = versality_check(make_deformation(base, {dirs[0], dirs[1], dirs[2]}), lab);
  CHECK(rep3.verdict == Verdict::not_versal);
}

TEST_CASE("doubly degenerate test vectors with a cross term") {
  // x^4 + x^2 y^2 + y^4 deformed by x^2, xy, y^2, x^2 y^2
  JetQ base = poly(2, 4, {{{4, 0}, 1}, {{2, 2}, 1}, {{0, 4}, 1}}, Parity::even);
  std::vector<JetQ> dirs = {
      poly(2, 4, {{{2, 0}, 1}}, Parity::even), poly(2, 4, {{{1, 1}, 1}}, Parity::even),
      poly(2, 4, {{{0, 2}, 1}}, Parity::even), poly(2, 4, {{{2, 2}, 1}}, Parity::even)};
  auto dj = make_deformation(base, dirs);

  auto xv = x_e_vec_seq(dj, 5, 1, 1);
  CHECK(xv.alpha == Rat(1));
  CHECK(xv.beta == Rat(1));
  CHECK(xv.x[0] == rats({0, 0, 0, -48}));
  CHECK(xv.x[1] == rats({2, 0, 0, 0}));
  CHECK(xv.x[2] == rats({0, 1, 0, 0}));
  CHECK(xv.x[3] == rats({0, 0, 2, 0}));
  CHECK(xv.xs[4] == Rat(24));

  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::x_e);
  REQUIRE(lab.index == 5);
  auto rep = versality_check(dj, lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 4);
  CHECK(rep.combined_test_set[3].second == rats({0, 0, 0, -48}));

  auto rep3 = versality_check(make_deformation(base, {dirs[0], dirs[1], dirs[2]}), lab);
  CHECK(rep3.verdict == Verdict::not_versal);
  CHECK(rep3.rank == 3);
}

TEST_CASE("vanishing cross term falls back to the span test") {
  JetQ base = poly(2, 4, {{{4, 0}, 1}, {{0, 4}, 1}}, Parity::even);
  std::vector<JetQ> dirs = {
      poly(2, 4, {{{2, 0}, 1}}, Parity::even), poly(2, 4, {{{1, 1}, 1}}, Parity::even),
      poly(2, 4, {{{0, 2}, 1}}, Parity::even), poly(2, 4, {{{2, 2}, 1}}, Parity::even)};
  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::x_e);
  REQUIRE(lab.has_modulus);
  CHECK(lab.modulus.exact_value == Rat(0));

  auto rep = versality_check(make_deformation(base, dirs), lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 4);
  CHECK(rep.combined_test_set.size() == 4);

  // x^4 is a gradient multiple here, so it cannot replace x^2 y^2
  std::vector<JetQ> bad = {dirs[0], dirs[1], dirs[2], poly(2, 4, {{{4, 0}, 1}}, Parity::even)};
  auto repb = versality_check(make_deformation(base, bad), lab);
  CHECK(repb.verdict == Verdict::not_versal);
  CHECK(repb.rank == 3);

  auto rep3 = versality_check(make_deformation(base, {dirs[0], dirs[1], dirs[2]}), lab);
  CHECK(rep3.verdict == Verdict::not_versal);
}

TEST_CASE("catalogue deformations test as versal") {
  struct Case {
    SingularityLabel lab;
    int nu;
  };
  std::vector<Case> cases = {
      {mk_label(Family::morse, 1, 1), 2},
      {mk_label(Family::a, 2, 1), 1},
      {mk_label(Family::a, 3, -1), 2},
      {mk_label(Family::a, 5, 1), 3},
      {mk_label(Family::a_e, 2, -1), 1},
      {mk_label(Family::a_e, 4, 1), 2},
      {mk_label(Family::d, 4, -1), 2},
      {mk_label(Family::d, 5, 1), 3},
      {mk_label(Family::d, 7, 1), 2},
      {mk_xe(5, 1, 1, Rat(3)), 2},
      {mk_xe(5, 1, -1, Rat(0)), 2},
      {mk_xe(5, -1, -1, Rat(-1)), 2},
      {mk_xe(6, 1, 1, Rat(1)), 2},
      {mk_xe(8, 1, -1, Rat(2)), 3},
  };
  for (const auto& c : cases) {
    CAPTURE(c.lab.display());
    auto dj = build_versal_deformation(c.lab, c.nu);
    CHECK(dj.l() == c.lab.mult - 1);
    auto rep = versality_check(dj, c.lab);
    CHECK(rep.verdict == Verdict::versal);
    CHECK(rep.rank == c.lab.mult - 1);

    // the built base really belongs to the class it was built for
    SingularityLabel got = classify(dj.base);
    CHECK(got.family == c.lab.family);
    CHECK(got.index == c.lab.index);
  }
}

TEST_CASE("built deformations recover the stated moduli") {
  auto dj = build_versal_deformation(mk_xe(5, 1, 1, Rat(3)), 2);
  SingularityLabel got = classify(dj.base);
  REQUIRE(got.has_modulus);
  CHECK(got.modulus.exact_value == Rat(3));

  auto dj8 = build_versal_deformation(mk_xe(8, 1, -1, Rat(2)), 2);
  SingularityLabel got8 = classify(dj8.base);
  REQUIRE(got8.has_modulus);
  CHECK(got8.modulus.exact_value == Rat(2));
  CHECK(got8.sign2 == -1);
}

TEST_CASE("reparametrization leaves the verdict alone") {
  JetQ base = poly(2, 4, {{{2, 1}, 1}, {{0, 4}, 1}});
  std::vector<JetQ> dirs = {poly(2, 4, {{{1, 0}, 1}}), poly(2, 4, {{{0, 1}, 1}}),
                            poly(2, 4, {{{0, 2}, 1}}), poly(2, 4, {{{2, 0}, 1}})};
  // invertible mix of the parameters
  std::vector<JetQ> mixed;
  mixed.push_back(dirs[0]);
  JetQ m1 = dirs[1];
  m1 += dirs[0];
  mixed.push_back(m1);
  JetQ m2 = dirs[2];
  {
    JetQ t = dirs[3];
    t *= Rat(2);
    m2 += t;
  }
  mixed.push_back(m2);
  JetQ m3 = dirs[3];
  m3 += dirs[1];
  mixed.push_back(m3);

  SingularityLabel lab = classify(base);
  auto rep = versality_check(make_deformation(base, mixed), lab);
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 4);

  // degenerate mix: last direction now lies in the span of the others
  std::vector<JetQ> flat = {dirs[0], dirs[1], dirs[2], dirs[1]};
  auto repf = versality_check(make_deformation(base, flat), lab);
  CHECK(repf.verdict == Verdict::not_versal);
}

TEST_CASE("even envelope handles a coupled regular variable") {
  // k^6 + k^3 z + z^2: eliminating z leaves (3/4) k^6
  JetQ base = poly(2, 6, {{{6, 0}, 1}, {{3, 1}, 1}, {{0, 2}, 1}}, Parity::even);
  auto dj = make_deformation(
      base, {poly(2, 6, {{{2, 0}, 1}}, Parity::even), poly(2, 6, {{{4, 0}, 1}}, Parity::even)});
  auto v = v_e_seq(dj, 3);
  CHECK(v[0] == rats({2, 0}));
  CHECK(v[1] == rats({0, 24}));

  SingularityLabel lab = classify(base);
  REQUIRE(lab.family == Family::a_e);
  REQUIRE(lab.index == 3);
  auto rep = versality_check(dj, lab);
  CHECK(rep.verdict == Verdict::versal);
}

TEST_CASE("trivial classes have nothing to unfold") {
  JetQ base = poly(2, 2, {{{2, 0}, 1}, {{0, 2}, 1}});
  auto dj = make_deformation(base, {});
  auto rep = versality_check(dj, mk_label(Family::morse, 1, 1));
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 0);
  CHECK(rep.combined_test_set.empty());

  JetQ ebase = poly(1, 2, {{{2}, 1}}, Parity::even);
  auto rep_e = versality_check(make_deformation(ebase, {}), mk_label(Family::a_e, 1, 1));
  CHECK(rep_e.verdict == Verdict::versal);
}

TEST_CASE("families outside the supported tests are refused") {
  JetQ e6 = poly(2, 4, {{{3, 0}, 1}, {{0, 4}, 1}});
  SingularityLabel lab = classify(e6);
  REQUIRE(lab.family == Family::e6);
  auto dj = make_deformation(e6, {poly(2, 4, {{{1, 0}, 1}})});
  CHECK(code_of([&] { versality_check(dj, lab); }) == errc::unsupported_label);
  CHECK(code_of([&] { build_versal_deformation(lab, 2); }) == errc::unsupported_label);

  SingularityLabel zt = mk_label(Family::z_e, 7, 1);
  CHECK(code_of([&] { build_versal_deformation(zt, 2); }) == errc::unsupported_label);
}

TEST_CASE("deformation preconditions are enforced") {
  JetQ base = poly(1, 4, {{{4}, 1}});

  // direction beyond the stored order
  CHECK(code_of([&] {
          make_deformation(base, {poly(1, 6, {{{6}, 1}})});
        }) == errc::precondition_violated);

  // direction with a constant term
  CHECK(code_of([&] {
          make_deformation(base, {poly(1, 4, {{{0}, 1}})});
        }) == errc::precondition_violated);

  // parity mismatch
  JetQ ebase = poly(1, 4, {{{4}, 1}}, Parity::even);
  CHECK(code_of([&] {
          make_deformation(ebase, {poly(1, 4, {{{2}, 1}})});
        }) == errc::parity_violation);

  // base not kernel-aligned: regular variable first
  JetQ swapped = poly(2, 4, {{{2, 0}, 1}, {{0, 4}, 1}});
  auto djs = make_deformation(swapped, {poly(2, 4, {{{0, 2}, 1}})});
  CHECK(code_of([&] { v_seq(djs, 3); }) == errc::precondition_violated);

  // reads beyond the stored order
  auto dj = make_deformation(base, {poly(1, 4, {{{2}, 1}})});
  CHECK(code_of([&] { v_seq(dj, 6); }) == errc::insufficient_jet);
  CHECK(code_of([&] { v_e_seq(dj, 3); }) == errc::parity_violation);

  // double line tests reject a base whose cubic is not adapted
  JetQ cube = poly(2, 4, {{{3, 0}, 1}, {{0, 4}, 1}});
  auto djc = make_deformation(cube, {poly(2, 4, {{{1, 0}, 1}})});
  CHECK(code_of([&] { w_seq(djc, 4); }) == errc::precondition_violated);

  // doubly degenerate tests demand matching quartic signs
  JetQ neg = poly(2, 4, {{{4, 0}, -1}, {{2, 2}, 1}, {{0, 4}, 1}}, Parity::even);
  auto djn = make_deformation(neg, {poly(2, 4, {{{2, 0}, 1}}, Parity::even)});
  CHECK(code_of([&] { x_e_vec_seq(djn, 5, 1, 1); }) == errc::adaptation_failure);

  JetQ nocross = poly(2, 4, {{{4, 0}, 1}, {{0, 4}, 1}}, Parity::even);
  auto djx = make_deformation(nocross, {poly(2, 4, {{{2, 0}, 1}}, Parity::even)});
  CHECK(code_of([&] { x_e_vec_seq(djx, 5, 1, 1); }) == errc::adaptation_failure);
}

TEST_CASE("floating verdicts use a guard band") {
  JetD base(1, 4);
  base.set_coeff(MultiIndex{4}, 1.0);

  JetD g1(1, 4);
  g1.set_coeff(MultiIndex{1}, 1.0);
  g1.set_coeff(MultiIndex{2}, 1.0);
  JetD g2(1, 4);
  g2.set_coeff(MultiIndex{1}, 1.0);
  g2.set_coeff(MultiIndex{2}, 1.0 + 1e-9);

  SingularityLabel lab = mk_label(Family::a, 3, 1);
  auto rep = versality_check(make_deformation(base, {g1, g2}), lab);
  CHECK(rep.verdict == Verdict::undetermined);

  // well separated directions are decided cleanly
  JetD g3(1, 4);
  g3.set_coeff(MultiIndex{2}, 1.0);
  auto rep2 = versality_check(make_deformation(base, {g1, g3}), lab);
  CHECK(rep2.verdict == Verdict::versal);
  CHECK(rep2.rank == 2);
}

TEST_CASE("floating double line family") {
  JetD base(2, 4);
  base.set_coeff(MultiIndex{2, 1}, 1.0);
  base.set_coeff(MultiIndex{0, 4}, 1.0);
  std::vector<JetD> dirs;
  for (auto a : {MultiIndex{1, 0}, MultiIndex{0, 1}, MultiIndex{0, 2}, MultiIndex{2, 0}}) {
    JetD g(2, 4);
    g.set_coeff(a, 1.0);
    dirs.push_back(g);
  }
  auto rep = versality_check(make_deformation(base, dirs), mk_label(Family::d, 5, 1));
  CHECK(rep.verdict == Verdict::versal);
  CHECK(rep.rank == 4);

  auto rep3 =
      versality_check(make_deformation(base, {dirs[0], dirs[1], dirs[2]}), mk_label(Family::d, 5, 1));
  CHECK(rep3.verdict == Verdict::not_versal);
}
