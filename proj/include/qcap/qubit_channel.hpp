#ifndef QCAP_QUBIT_CHANNEL_HPP
#define QCAP_QUBIT_CHANNEL_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcap/quantum_info.hpp"

namespace qcap {

struct BlochPoint {
    double x = 0.0, y = 0.0, z = 0.0;

    double norm() const;
    BlochPoint operator+(const BlochPoint& o) const { return {x + o.x, y + o.y, z + o.z}; }
    BlochPoint operator-(const BlochPoint& o) const { return {x - o.x, y - o.y, z - o.z}; }
    BlochPoint operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const BlochPoint& o) const { return x * o.x + y * o.y + z * o.z; }
};

/// Affine Bloch-sphere map r -> linear r + shift, optionally carrying the
/// Pauli-Kraus probabilities that induced it.
struct QubitChannel {
    std::array<std::array<double, 3>, 3> linear{};
    std::array<double, 3> shift{};
    std::optional<std::array<double, 4>> kraus_probs;
    std::string name = "channel";

    BlochPoint map(const BlochPoint& p) const;
    static QubitChannel diagonal(double lx, double ly, double lz,
                                 double tx = 0.0, double ty = 0.0, double tz = 0.0);
};

DensityMatrix stokes_density(const BlochPoint& p);
BlochPoint density_to_stokes(const DensityMatrix& rho);

/// Generalized depolarizing channel rho -> sum_s p_s sigma_s rho sigma_s^dag,
/// with the induced diagonal affine form recorded.
QubitChannel pauli_channel(double p0, double px, double py, double pz);

/// Affine route; when kraus_probs is present the Kraus route is evaluated too
/// and a disagreement beyond 1e-12 throws.
DensityMatrix apply_channel(const QubitChannel& c, const DensityMatrix& rho);

struct CptpReport {
    bool is_cptp = false;
    double min_choi_eigenvalue = 0.0;
};

/// 4x4 Choi matrix (c x id applied to (|00>+|11>)/sqrt(2)); CPTP iff its
/// minimum eigenvalue is >= -tol.
CptpReport cptp_check(const QubitChannel& c, double tol = 1e-10);
ComplexMatrix choi_matrix(const QubitChannel& c);

/// Axis-ordering condition p0+pz-px-py >= |p0+py-px-pz|, |p0+px-py-pz|.
bool king_ruskai_ordered(double p0, double px, double py, double pz);

struct StinespringPair {
    PureState psi;       // on 2 (x) 4
    PureState psi_perp;  // orthogonal partner
};

StinespringPair stinespring_pair(double p0, double px, double py, double pz);

/// s |psi><psi| + (1-s) |psi_perp><psi_perp| on the 2 (x) 4 system.
DensityMatrix stinespring_pair_state(double p0, double px, double py, double pz, double s);

/// Text form: `name mxx mxy mxz myx ... mzz cx cy cz` or `name pauli p0 px py pz`,
/// 17 significant digits; one channel per line, '#' comments.
std::string serialize_channel(const QubitChannel& c);
QubitChannel parse_channel_line(const std::string& line);
std::vector<QubitChannel> parse_channel_file(const std::string& path);

}  // namespace qcap

#endif
