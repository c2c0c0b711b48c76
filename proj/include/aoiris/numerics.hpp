#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace aoiris {

using cxd = std::complex<double>;
using ComplexVec = Eigen::VectorXcd;
using ComplexMat = Eigen::MatrixXcd;
using RealVec = Eigen::VectorXd;
using RealMat = Eigen::MatrixXd;

// Deterministic random stream. Identical (seed, stream) pairs reproduce the
// same draw sequence; there is no global RNG anywhere in the library.
// Gaussian draws use Box-Muller on top of mt19937_64; std::normal_distribution
// is not byte-stable across standard library implementations.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform();
    /// Standard normal.
    double normal();
    /// Circularly-symmetric complex Gaussian with E|x|^2 = 1.
    cxd cn();
    std::uint64_t next_u64();

    /// Independent child stream, e.g. one per Monte-Carlo repetition.
    RngStream substream(std::uint64_t id) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// a^H b. Conjugate-symmetric: hermitian_product(a,b) == conj(hermitian_product(b,a)).
cxd hermitian_product(const ComplexVec& a, const ComplexVec& b);

/// Maps M to [[Re M, -Im M], [Im M, Re M]]. Ring homomorphism: the embedding
/// of a product equals the product of the embeddings.
RealMat complex_to_real_embedding(const ComplexMat& m);

// The one Re/Im stacking convention used wherever a complex vector enters the
// real-valued solver: [Re(z); Im(z)].
RealVec stack_complex(const ComplexVec& z);
ComplexVec unstack_complex(const RealVec& x);

/// Matrix with i.i.d. CN(0,1) entries (Re and Im each N(0, 1/2)).
ComplexMat sample_cn(Eigen::Index rows, Eigen::Index cols, RngStream& rng);

}  // namespace aoiris
