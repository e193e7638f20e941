#pragma once

#include "germlab/jet.hpp"
#include "germlab/labels.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace germlab {

enum class Domain { box, torus };

// How a tracked critical point sits relative to the symmetry k -> -k.
// Fixed points of the symmetry are basic: the origin in a box, the
// half-period lattice on a torus. Everything else pairs up into twins.
// Families without the symmetry only have plain points.
enum class PointKind { basic, twin, plain };

// A parameter family F(k, lambda) on nu variables with up to three
// parameters, presented one of two ways:
//   - polynomial: lambda -> the k-polynomial F(., lambda) as an exact jet;
//   - value: plain evaluation, for periodic families on the torus.
// Derivatives come from the jet when it is there and from central
// differences otherwise.
struct FamilySpec {
  int nu = 1;
  int n_params = 1;
  Parity parity = Parity::general;
  Domain domain = Domain::box;

  std::function<JetD(const std::vector<double>&)> polynomial;
  std::function<double(const std::vector<double>&, const std::vector<double>&)> value;
  int fd_degree = 6;  // local jet order used for the value backend

  // Critical point search window for the box domain; empty means +-2.5 in
  // every variable. Torus coordinates live in [0, 2pi) and need no window.
  std::vector<double> k_lo, k_hi;

  // Parameter box and per-axis node counts. An axis with one node is pinned
  // at its lower bound, so a planar slice of a three-parameter family is
  // grid {1, n, m}. One or two axes may have more than one node.
  std::vector<double> lam_lo, lam_hi;
  std::vector<int> grid;

  int seeds_per_axis = 0;  // 0 picks a density by variable count
  int newton_max_iters = 40;
  double newton_tol = 0.0;   // |grad| <= tol * scale; 0 picks 1e-12 (jets) or 1e-9 (values)
  double dedupe_tol = 1e-6;
  double lambda_tol = 0.0;   // crossing refinement width; 0 picks 1e-10 (jets) or 1e-7 (values)
};

struct CriticalPoint {
  std::vector<double> k;
  PointKind kind = PointKind::plain;
  double value = 0.0;
  double det_hessian = 0.0;
  int morse_index = 0;     // negative Hessian eigenvalues
  double grad_norm = 0.0;  // residual left by the solver
  bool labeled = false;
  SingularityLabel label;  // filled on request
};

struct FindOptions {
  bool label = false;
  std::vector<std::vector<double>> warm_starts;
  bool seed_grid = true;  // off: only warm starts and the basic lattice
};

// All critical points of F(., lambda) inside the window, by multistart
// damped Newton on the gradient. Seeds that diverge are dropped, never an
// error. Even families come back symmetrized: the twin of every twin is in
// the list and basic coordinates are snapped to the symmetry lattice.
// Deterministic: sorted by kind, then coordinates.
std::vector<CriticalPoint> find_critical_points(const FamilySpec& family,
                                                const std::vector<double>& lambda,
                                                const FindOptions& opts = {});

// Matches each twin with its image under k -> -k (2pi - k per coordinate on
// the torus), returning index pairs into points. Basic and plain points are
// left alone. A twin with no partner within tol throws pairing_failure.
std::vector<std::pair<std::size_t, std::size_t>> pair_twins(
    const std::vector<CriticalPoint>& points, Domain domain, double tol = 1e-6);

// What the critical point set looks like over one parameter region.
struct CensusCount {
  int basic = 0;
  int twin_pairs = 0;
  int plain = 0;
  std::map<int, int> basic_by_morse_index;
  bool operator==(const CensusCount&) const = default;
};

struct CrossingPoint {
  std::vector<double> lambda;  // refined parameter point on the caustic
  std::vector<double> k;       // the degenerate critical point
  double residual = 0.0;       // |det Hess| left at (k, lambda)
  bool labeled = false;
  SingularityLabel label;
  bool ambiguous = false;  // census jumped more than one event here
  int axis = 0;            // parameter axis of the carrying grid edge
  std::vector<int> node;   // full grid index of the edge's lower node
};

struct CausticRegion {
  int id = 0;
  int nodes = 0;
  std::vector<double> sample_lambda;  // an interior node when one exists
  CensusCount census;
  bool unresolved = false;  // interior nodes disagreed, or none were interior
};

struct GridSpec {
  std::vector<double> lo, hi;  // all parameter axes
  std::vector<int> n;          // nodes per axis; 1 pins the axis at lo
  std::vector<int> swept;      // axes with more than one node, ascending

  std::vector<double> node_lambda(const std::vector<int>& node) const;
};

// Caustic of a family over its parameter grid: every grid edge whose census
// changes is bisected down to crossing points, and the leftover nodes are
// flood-filled into regions of constant census.
struct CausticDiagram {
  int nu = 0;
  int n_params = 0;
  Parity parity = Parity::general;
  Domain domain = Domain::box;
  GridSpec grid;
  std::vector<CrossingPoint> crossings;
  std::vector<CausticRegion> regions;
  // Region id per node, row-major over the swept axes with the first swept
  // axis fastest. Every node belongs to a region.
  std::vector<int> region_of_node;
  int unresolved_cells = 0;
};

// Sweeps the family's parameter grid with one or two swept axes. Rows are
// processed independently (GERMLAB_THREADS caps the parallelism) and the
// result does not depend on the thread count.
CausticDiagram sweep(const FamilySpec& family);

const std::vector<CausticRegion>& region_census(const CausticDiagram& diagram);

}  // namespace germlab
