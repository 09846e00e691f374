#include "qcap/qubit_channel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qcap {

namespace {

const complex kI{0.0, 1.0};

void validate_probs(double p0, double px, double py, double pz) {
    for (double p : {p0, px, py, pz})
        if (p < -1e-12) throw std::invalid_argument("pauli probabilities: negative entry");
    if (std::abs(p0 + px + py + pz - 1.0) > 1e-12)
        throw std::invalid_argument("pauli probabilities: sum != 1");
}

ComplexMatrix pauli(std::size_t k) {
    switch (k) {
        case 0: return ComplexMatrix(2, {1, 0, 0, 1});
        case 1: return ComplexMatrix(2, {0, 1, 1, 0});
        case 2: return ComplexMatrix(2, {0, -kI, kI, 0});
        default: return ComplexMatrix(2, {1, 0, 0, -1});
    }
}

}  // namespace

double BlochPoint::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochPoint QubitChannel::map(const BlochPoint& p) const {
    const double in[3] = {p.x, p.y, p.z};
    double out[3];
    for (int r = 0; r < 3; ++r) {
        out[r] = shift[r];
        for (int c = 0; c < 3; ++c) out[r] += linear[r][c] * in[c];
    }
    return {out[0], out[1], out[2]};
}

QubitChannel QubitChannel::diagonal(double lx, double ly, double lz,
                                    double tx, double ty, double tz) {
    QubitChannel c;
    c.linear[0][0] = lx;
    c.linear[1][1] = ly;
    c.linear[2][2] = lz;
    c.shift = {tx, ty, tz};
    return c;
}

DensityMatrix stokes_density(const BlochPoint& p) {
    if (p.norm() > 1.0 + 1e-12)
        throw std::invalid_argument("stokes_density: point outside Bloch ball");
    ComplexMatrix m(2);
    m(0, 0) = 0.5 * (1.0 + p.z);
    m(1, 1) = 0.5 * (1.0 - p.z);
    m(0, 1) = 0.5 * complex(p.x, -p.y);
    m(1, 0) = 0.5 * complex(p.x, p.y);
    return DensityMatrix(std::move(m));
}

BlochPoint density_to_stokes(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw std::invalid_argument("density_to_stokes: need a qubit state");
    const ComplexMatrix& m = rho.matrix;
    return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

QubitChannel pauli_channel(double p0, double px, double py, double pz) {
    validate_probs(p0, px, py, pz);
    QubitChannel c = QubitChannel::diagonal(p0 + px - py - pz, p0 + py - px - pz,
                                            p0 + pz - px - py);
    c.kraus_probs = {p0, px, py, pz};
    return c;
}

DensityMatrix apply_channel(const QubitChannel& c, const DensityMatrix& rho) {
    if (rho.dim() != 2) throw std::invalid_argument("apply_channel: need a qubit state");
    const BlochPoint out = c.map(density_to_stokes(rho));
    if (out.norm() > 1.0 + 1e-9)
        throw std::runtime_error("apply_channel: output left the Bloch ball (channel not CPTP?)");
    BlochPoint clipped = out;
    if (const double n = out.norm(); n > 1.0) clipped = out * (1.0 / n);
    DensityMatrix result = stokes_density(clipped);

    if (c.kraus_probs) {
        ComplexMatrix kr(2);
        for (std::size_t s = 0; s < 4; ++s) {
            const double p = (*c.kraus_probs)[s];
            if (p == 0.0) continue;
            kr += pauli(s) * rho.matrix * pauli(s) * complex(p);
        }
        if (result.matrix.max_abs_diff(kr) > 1e-12)
            throw std::runtime_error("apply_channel: Kraus and affine routes disagree");
    }
    return result;
}

ComplexMatrix choi_matrix(const QubitChannel& c) {
    // Lambda on a matrix unit via the Pauli expansion: E = (tau I + sum c_k
    // sigma_k)/2 maps to (tau I + sum (L c + tau t)_i sigma_i)/2.
    auto apply_general = [&](const ComplexMatrix& e) {
        const complex tau = e.trace();
        complex coef[3];
        for (int k = 0; k < 3; ++k) coef[k] = (pauli(k + 1) * e).trace();
        ComplexMatrix out(2);
        out += ComplexMatrix::identity(2) * (0.5 * tau);
        for (int i = 0; i < 3; ++i) {
            complex ci = tau * c.shift[i];
            for (int k = 0; k < 3; ++k) ci += c.linear[i][k] * coef[k];
            out += pauli(i + 1) * (0.5 * ci);
        }
        return out;
    };

    ComplexMatrix choi(4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            ComplexMatrix unit(2);
            unit(i, j) = 1.0;
            const ComplexMatrix mapped = apply_general(unit);
            for (std::size_t r = 0; r < 2; ++r)
                for (std::size_t s = 0; s < 2; ++s)
                    choi(r * 2 + i, s * 2 + j) += 0.5 * mapped(r, s);
        }
    return choi;
}

CptpReport cptp_check(const QubitChannel& c, double tol) {
    const auto eigs = hermitian_eigenvalues(choi_matrix(c));
    const double min_eig = eigs.back();
    return {min_eig >= -tol, min_eig};
}

bool king_ruskai_ordered(double p0, double px, double py, double pz) {
    const double lz = p0 + pz - px - py;
    return lz >= std::abs(p0 + py - px - pz) && lz >= std::abs(p0 + px - py - pz);
}

StinespringPair stinespring_pair(double p0, double px, double py, double pz) {
    validate_probs(p0, px, py, pz);
    const double s0 = std::sqrt(std::max(p0, 0.0));
    const double sx = std::sqrt(std::max(px, 0.0));
    const double sy = std::sqrt(std::max(py, 0.0));
    const double sz = std::sqrt(std::max(pz, 0.0));
    // Index o*4 + a over output qubit o and 4-dim auxiliary a.
    std::vector<complex> psi(8), perp(8);
    psi[0 * 4 + 0] = s0;
    psi[1 * 4 + 1] = sx;
    psi[1 * 4 + 2] = kI * sy;
    psi[0 * 4 + 3] = sz;
    perp[1 * 4 + 0] = s0;
    perp[0 * 4 + 1] = sx;
    perp[0 * 4 + 2] = -kI * sy;
    perp[1 * 4 + 3] = -sz;
    const FactoredDims dims{2, 4};
    return {PureState(std::move(psi), dims), PureState(std::move(perp), dims)};
}

DensityMatrix stinespring_pair_state(double p0, double px, double py, double pz, double s) {
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("stinespring_pair_state: weight outside [0,1]");
    const StinespringPair pair = stinespring_pair(p0, px, py, pz);
    ComplexMatrix m(8);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c)
            m(r, c) = s * pair.psi.vec[r] * std::conj(pair.psi.vec[c]) +
                      (1.0 - s) * pair.psi_perp.vec[r] * std::conj(pair.psi_perp.vec[c]);
    return DensityMatrix(std::move(m), FactoredDims{2, 4});
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string serialize_channel(const QubitChannel& c) {
    std::ostringstream os;
    os << c.name;
    if (c.kraus_probs) {
        os << " pauli";
        for (double p : *c.kraus_probs) os << ' ' << fmt17(p);
    } else {
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col) os << ' ' << fmt17(c.linear[r][col]);
        for (double t : c.shift) os << ' ' << fmt17(t);
    }
    return os.str();
}

QubitChannel parse_channel_line(const std::string& line) {
    std::istringstream is(line);
    std::string name, second;
    if (!(is >> name >> second)) throw std::invalid_argument("channel line: too few fields");
    if (second == "pauli") {
        double p[4];
        if (!(is >> p[0] >> p[1] >> p[2] >> p[3]))
            throw std::invalid_argument("channel line: pauli form needs 4 probabilities");
        QubitChannel c = pauli_channel(p[0], p[1], p[2], p[3]);
        c.name = name;
        return c;
    }
    QubitChannel c;
    c.name = name;
    std::vector<double> v;
    v.push_back(std::stod(second));
    double x;
    while (is >> x) v.push_back(x);
    if (v.size() != 12)
        throw std::invalid_argument("channel line: affine form needs 12 numbers");
    for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col) c.linear[r][col] = v[r * 3 + col];
    for (int i = 0; i < 3; ++i) c.shift[i] = v[9 + i];
    return c;
}

std::vector<QubitChannel> parse_channel_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open channel file: " + path);
    std::vector<QubitChannel> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        out.push_back(parse_channel_line(line.substr(first)));
    }
    return out;
}

}  // namespace qcap
