#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "qmsd/codes.hpp"
#include "qmsd/wigner.hpp"

namespace qmsd {

// True when the phase-space point (z, x) lies in the code's solution set:
// alpha.x - beta.z = s (mod d) for every generator row.
bool membership_test(const StabilizerCode& code, const std::vector<int>& z, const std::vector<int>& x);

// Logical phase-space coordinates of a codespace point, read off with the
// logical pair: x_L = a_z.x - b_z.z, z_L = b_x.z - a_x.x (mod d).  With this
// orientation a trivial code passes the pass-through qudit's coordinates
// straight to (z_L, x_L); the dense-matrix oracle pins the same convention.
std::pair<int, int> logical_coordinates(const LogicalPair& logical,
                                        const std::vector<int>& z, const std::vector<int>& x);

// Affine parameterization of the codespace.  generator columns are the N-1
// stabilizer rows as points (z = a, x = b), then Z_L, then X_L; the point for
// coefficients (u, z_L, x_L) is generator * (u; z_L; x_L) + particular.  The
// particular solution is adjusted to carry logical coordinates (0, 0), so
// every point generated at (z_L, x_L) reads back those coordinates.
struct CodespaceBasis {
    int d = 0;
    int N = 0;
    ZdMatrix generator;   // 2N x (N+1), rows 0..N-1 = z part, N..2N-1 = x part
    ZdVector particular;  // length 2N, zero when the syndrome vanishes
    LogicalPair logical;
    StabilizerCode code;
};

CodespaceBasis make_codespace_basis(const StabilizerCode& code);

// Visits the d^{N-1} codespace points with logical coordinates (z_l, x_l).
void enumerate_codespace(const CodespaceBasis& basis, int z_l, int x_l,
                         const std::function<void(const std::vector<int>& z,
                                                  const std::vector<int>& x)>& fn);

struct DistillationResult {
    WignerFunction w_out;              // single-qudit output quasidistribution
    double acceptance_probability = 0; // exact: total histogram mass; mc: accepted/samples
    std::vector<double> histogram;     // raw accumulator, cell index z_L*d + x_L
};

// Exact engine: sweeps all d^{N+1} codespace points, accumulating the product
// of input Wigner values into the logical histogram.  Work is split into
// fixed u-blocks merged in block order, so results are bit-identical for any
// worker count.  threads <= 0 resolves via QMSD_THREADS, then hardware.
DistillationResult distill_exact(const StabilizerCode& code, const WignerFunction& w_in, int threads = 0);
DistillationResult distill_exact(const CodespaceBasis& basis, const WignerFunction& w_in, int threads = 0);

struct McDistillationResult {
    DistillationResult result;
    uint64_t accepted = 0;
    uint64_t samples = 0;
    uint64_t seed = 0;
};

// Monte Carlo engine: inverse-CDF sampling of the product distribution with
// mt19937_64, membership filtering, logical binning.  Samples are divided
// over a fixed number of streams seeded from (seed, stream index), so output
// is bit-identical for any worker count.  Negative input entries beyond
// -1e-12 are rejected.
McDistillationResult distill_mc(const StabilizerCode& code, const WignerFunction& w_in,
                                uint64_t samples, uint64_t seed, int threads = 0);

// Name recorded in output metadata for the sampling generator.
inline constexpr const char* kMcGeneratorName = "mt19937_64";

struct SweepRow {
    double nu_in = 0;
    double nu_out = 0;
    double acceptance = 0;
};

// Runs the exact engine on the nu-family anchored at face (u, v) for each
// grid value; nu_out is the output value read at the same face.
std::vector<SweepRow> nu_sweep(const StabilizerCode& code, int u, int v,
                               const std::vector<double>& grid, int threads = 0);

// f(0) at the given face: the output value at (u, v) for the family input
// with nu = 0.  Zero exactly for trivial codes, strictly positive otherwise.
double verify_bound_gap(const StabilizerCode& code, int u, int v, int threads = 0);

}  // namespace qmsd
