#include "aoiris/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace aoiris {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed & 0xffffffffu),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream & 0xffffffffu),
        static_cast<std::uint32_t>(stream >> 32),
    };
    eng_.seed(seq);
}

double RngStream::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

cxd RngStream::cn() {
    // Fresh Box-Muller pair, scaled so E|x|^2 = 1; does not touch the spare.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-std::log(u1));  // sqrt(-2 ln u) / sqrt(2)
    const double phi = 2.0 * M_PI * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

std::uint64_t RngStream::next_u64() { return eng_(); }

RngStream RngStream::substream(std::uint64_t id) const {
    // splitmix64 keeps distinct (stream, id) pairs from colliding.
    std::uint64_t z = stream_ + 0x9e3779b97f4a7c15ULL * (id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return RngStream(seed_, z ^ (z >> 31));
}

cxd hermitian_product(const ComplexVec& a, const ComplexVec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hermitian_product: length mismatch");
    }
    return a.dot(b);  // Eigen conjugates the first operand
}

RealMat complex_to_real_embedding(const ComplexMat& m) {
    const Eigen::Index r = m.rows();
    const Eigen::Index c = m.cols();
    RealMat out(2 * r, 2 * c);
    out.topLeftCorner(r, c) = m.real();
    out.topRightCorner(r, c) = -m.imag();
    out.bottomLeftCorner(r, c) = m.imag();
    out.bottomRightCorner(r, c) = m.real();
    return out;
}

RealVec stack_complex(const ComplexVec& z) {
    RealVec x(2 * z.size());
    x.head(z.size()) = z.real();
    x.tail(z.size()) = z.imag();
    return x;
}

ComplexVec unstack_complex(const RealVec& x) {
    if (x.size() % 2 != 0) {
        throw std::invalid_argument("unstack_complex: odd length");
    }
    const Eigen::Index n = x.size() / 2;
    ComplexVec z(n);
    z.real() = x.head(n);
    z.imag() = x.tail(n);
    return z;
}

ComplexMat sample_cn(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
    if (rows < 0 || cols < 0) {
        throw std::invalid_argument("sample_cn: negative dims");
    }
    ComplexMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = rng.cn();
        }
    }
    return m;
}

}  // namespace aoiris
