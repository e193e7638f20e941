#include "germlab/labels.hpp"

#include "germlab/errors.hpp"

#include <sstream>

namespace germlab {

std::string family_name(Family f) {
  switch (f) {
    case Family::regular: return "Regular";
    case Family::morse: return "Morse";
    case Family::a: return "A";
    case Family::d: return "D";
    case Family::e6: return "E6";
    case Family::a_e: return "Ae";
    case Family::x_e: return "Xe";
    case Family::y_e_candidate: return "YeCandidate";
    case Family::y_tilde_e: return "YtildeE";
    case Family::z_e: return "Ze";
    case Family::unknown: return "Unknown";
  }
  return "Unknown";
}

namespace {

const char* sign_char(int s) { return s > 0 ? "+" : (s < 0 ? "-" : "?"); }

}  // namespace

std::string SingularityLabel::display() const {
  std::ostringstream os;
  switch (family) {
    case Family::regular: return "Regular";
    case Family::unknown: return "Unknown";
    case Family::morse:
      os << "A1";
      if (sign1 != 0) os << sign_char(sign1);
      return os.str();
    case Family::a: os << "A" << index << sign_char(sign1); return os.str();
    case Family::d: os << "D" << index << sign_char(sign1); return os.str();
    case Family::e6: os << "E6" << sign_char(sign1); return os.str();
    case Family::a_e: os << "Ae" << index << sign_char(sign1); return os.str();
    case Family::x_e:
      os << "Xe" << index << "(" << sign_char(sign1) << sign_char(sign2) << ")";
      break;
    case Family::y_e_candidate:
      os << "Ye(" << r << "," << s << ") candidate";
      break;
    case Family::y_tilde_e: os << "YtildeE" << index << sign_char(sign1); break;
    case Family::z_e: os << "Ze7" << sign_char(sign1); break;
  }
  if (has_modulus) {
    os << " a=";
    if (modulus.exact)
      os << modulus.exact_value;
    else
      os << modulus.value;
  }
  return os.str();
}

ClassMetadata catalogue_metadata(const SingularityLabel& label) {
  ClassMetadata m;
  int k = label.index;
  switch (label.family) {
    case Family::morse:
      m.mult = 1;
      m.codim = 0;
      m.beta = Rat(0);
      break;
    case Family::a:
      if (k < 1) fail(errc::unknown_label, "A index must be >= 1");
      m.mult = k;
      m.codim = k - 1;
      m.beta = Rat(k - 1, 2 * k + 2);
      break;
    case Family::d:
      if (k < 4) fail(errc::unknown_label, "D index must be >= 4");
      m.mult = k;
      m.codim = k - 1;
      m.beta = Rat(k - 2, 2 * k - 2);
      break;
    case Family::e6:
      m.mult = 6;
      m.codim = 5;
      m.beta = Rat(5, 12);
      break;
    case Family::a_e:
      if (k < 1) fail(errc::unknown_label, "Ae index must be >= 1");
      m.mult = k;
      m.codim = k - 1;
      m.beta = Rat(k - 1, 2 * k);
      break;
    case Family::x_e:
      if (k < 5) fail(errc::unknown_label, "Xe index must be >= 5");
      m.mult = k;
      m.codim = k - 2;
      m.beta = Rat(1, 2);
      break;
    case Family::y_e_candidate:
      if (label.r < 3 || label.s < 3) fail(errc::unknown_label, "Ye exponents must be >= 3");
      m.mult = label.r + label.s + 1;
      m.codim = label.r + label.s - 1;
      m.beta = Rat(1, 2);
      break;
    case Family::y_tilde_e:
      if (k < 3) fail(errc::unknown_label, "Ytilde index must be >= 3");
      m.mult = 2 * k + 1;
      m.codim = 2 * k - 1;
      m.beta = Rat(1, 2);
      break;
    case Family::z_e:
      m.mult = 7;
      m.codim = 5;
      m.beta = Rat(5, 9);
      break;
    case Family::regular:
    case Family::unknown:
      fail(errc::unknown_label, family_name(label.family) + " has no catalogue row");
  }
  m.modality = m.mult - m.codim - 1;
  return m;
}

std::vector<CatalogueRow> catalogue_general() {
  return {
      {"A_k^+-", "+- x^(k+1)", "k >= 1", "k", "k-1", "(k-1)/(2k+2)", 0},
      {"D_k^+-", "x^2 y +- y^(k-1)", "k >= 4", "k", "k-1", "(k-2)/(2k-2)", 0},
      {"E_6^+-", "x^3 +- y^4", "", "6", "5", "5/12", 0},
  };
}

std::vector<CatalogueRow> catalogue_even() {
  return {
      {"Ae_k^+-", "+- x^(2k)", "k >= 1", "k", "k-1", "(k-1)/(2k)", 0},
      {"Xe_5^+-+-", "+- x^4 + a x^2 y^2 +- y^4", "a^2 != 4 when signs agree", "5", "3", "1/2", 1},
      {"Xe_(r+3)^+-+-", "+- x^4 +- x^2 y^2 + a y^(2r)", "a != 0, r >= 3", "r+3", "r+1", "1/2", 1},
      {"Ye_(r,s)^+-+-", "+- x^(2r) + a x^2 y^2 +- y^(2s)", "a != 0, r >= 3, s >= 3", "r+s+1",
       "r+s-1", "1/2", 1},
      {"Ytilde_e_r^+-", "+- (x^2+y^2)^2 + a y^(2r)", "a > 0, r >= 3", "2r+1", "2r-1", "1/2", 1},
      {"Ze_7^+-", "x^3 y +- y^6 + a x y^5", "", "7", "5", "5/9", 1},
  };
}

}  // namespace germlab
