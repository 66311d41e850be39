#pragma once

#include "aztec/spectral.hpp"
#include "aztec/tiling.hpp"

#include <functional>
#include <vector>

namespace aztec {

// Lattice point (2m + eps, u) with u = 2x + 2 - j; j selects the block row/column.
struct KernelIndex {
    int m = 0;
    int x = 0;
    int eps = 0;
    int j = 0;
};

KernelIndex site_index(const Site& s);
Site index_site(const KernelIndex& k);

struct QuadratureConfig {
    double rho1 = 0.0;  // 0 selects the default a^{4/3}
    double rho2 = 0.0;  // 0 selects the default a^{-4/3}
    int n_nodes = 256;
    int max_nodes = 16384;
    double rel_tol = 1e-10;

    void validate(const ModelParams& p) const;
    double r1(const ModelParams& p) const;
    double r2(const ModelParams& p) const;
};

// block(j, j') is the scalar kernel between (i1 with j) and (i2 with j').
struct KernelBlock {
    Mat2 value = Mat2::Zero();
    double est_error = 0.0;
    int nodes = 0;
};

KernelBlock kernel_direct(const ModelParams& p, int N, const KernelIndex& i1, const KernelIndex& i2,
                          const QuadratureConfig& q = {});
KernelBlock kernel_periodic(const ModelParams& p, int d, int N, const KernelIndex& i1,
                            const KernelIndex& i2, const QuadratureConfig& q = {});
// Indices are relative to the period cell at column 2dT and height 2X.
KernelBlock kernel_spectral(const ModelParams& p, int d, int N, int T, int X, const KernelIndex& i1,
                            const KernelIndex& i2, const QuadratureConfig& q = {});
KernelBlock gas_kernel(const ModelParams& p, int d, const KernelIndex& i1, const KernelIndex& i2,
                       const QuadratureConfig& q = {});

// Scalar kernel matrix K[s][t] for all pairs of sites (direct form, size N).
struct KernelMatrix {
    Eigen::MatrixXd K;
    double est_error = 0.0;
};
KernelMatrix kernel_matrix_direct(const ModelParams& p, int N, const std::vector<Site>& sites,
                                  const QuadratureConfig& q = {});
// Blocks M[f][g] for index lists of the spectral form; block(i1=g, i2=f) as above.
std::vector<std::vector<KernelBlock>> kernel_spectral_blocks(const ModelParams& p, int d, int N, int T,
                                                             int X, const std::vector<KernelIndex>& idx,
                                                             const QuadratureConfig& q = {});

double kernel_entry(const KernelBlock& b, const KernelIndex& i1, const KernelIndex& i2);

using KernelFn = std::function<double(const Site&, const Site&)>;
double correlation(const KernelFn& K, const std::vector<Site>& pts);

struct WeightedTiling {
    Tiling tiling;
    double prob = 0.0;
    std::vector<Site> particles;
};

std::vector<WeightedTiling> enumerate_measure(const ModelParams& p, int N);
// Sites at heights u <= -N are always occupied by the frozen lower paths.
double bruteforce_correlation(const std::vector<WeightedTiling>& measure, int N,
                              const std::vector<Site>& pts);
double bruteforce_correlation(const ModelParams& p, int N, const std::vector<Site>& pts);

}  // namespace aztec
