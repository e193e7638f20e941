#pragma once

#include "germlab/rational.hpp"

#include <string>
#include <vector>

namespace germlab {

enum class Family {
  regular,        // nonzero linear part, no critical point to classify
  morse,          // non-degenerate critical point (A1 / Ae1)
  a,              // one kernel direction, general functions
  d,              // two kernel directions, cubic with a simple root pattern
  e6,             // two kernel directions, cubic a perfect cube
  a_e,            // one kernel direction, even functions
  x_e,            // even, squarefree or doubly-degenerate quartic
  y_e_candidate,  // even, quartic a product of two distinct line squares
  y_tilde_e,      // even, quartic a definite square
  z_e,            // even, quartic with a triple line
  unknown,        // outside the catalogue at the stored order
};

std::string family_name(Family f);

// Numeric result that stays exact when the pipeline that produced it was
// exact end to end.
struct ScalarReport {
  bool exact = false;
  Rat exact_value{};
  double value = 0.0;

  static ScalarReport from_rat(const Rat& q) {
    return {true, q, q.convert_to<double>()};
  }
  static ScalarReport from_double(double x) { return {false, Rat(0), x}; }
};

struct SingularityLabel {
  Family family = Family::unknown;
  int index = 0;  // the subscript: mu for A/D/Ae/Xe, 6 for E6, r for Ytilde, 7 for Ze
  int r = 0, s = 0;  // exponent pair of a y_e_candidate

  // Normal form signs; meaning is family specific and 0 marks an unused slot.
  //   A/Ae:   sign1 = sign of the leading power
  //   D:      sign1 = sign of the y-power term
  //   E6:     sign1 = sign of the quartic term
  //   Xe5:    sign1, sign2 = signs of x^4 and y^4
  //   Xe,mu>=6: sign1, sign2 = signs of x^4 and x^2y^2
  //   Ytilde: sign1 = sign of the square
  //   Ze:     sign1 = sign of y^6
  int sign1 = 0, sign2 = 0;

  bool has_modulus = false;
  ScalarReport modulus;

  int mult = 0;       // local multiplicity (even multiplicity for even classes)
  int codim = 0;      // parameters a versal family needs
  Rat beta{};         // scaling exponent
  int modality = 0;

  std::string reason;              // one-line route summary
  std::vector<std::string> flags;  // "floating", "heuristic-input", ...

  std::string display() const;  // "A5+", "Xe5(+-)", "Ye(3,4) candidate", ...
};

struct ClassMetadata {
  int mult = 0;
  int codim = 0;
  Rat beta{};
  int modality = 0;
};

// Invariants of a catalogue class. Throws unknown_label for families without
// catalogue rows (regular, unknown).
ClassMetadata catalogue_metadata(const SingularityLabel& label);

// One row of the printed catalogue.
struct CatalogueRow {
  std::string name;
  std::string normal_form;
  std::string restrictions;
  std::string mult;
  std::string codim;
  std::string beta;
  int modality = 0;
};

std::vector<CatalogueRow> catalogue_general();
std::vector<CatalogueRow> catalogue_even();

}  // namespace germlab
