// Command-line front end: channel capacity, entanglement-gap certificates,
// superadditivity searches, and the supporting scans.
//
// Exit codes: 0 success / nothing found, 1 error, 2 a search command found
// the object it was looking for (violation, gap point, ...).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qcap/entanglement.hpp"
#include "qcap/holevo.hpp"
#include "qcap/qubit_channel.hpp"
#include "qcap/rng.hpp"
#include "qcap/search.hpp"

using nlohmann::json;

namespace {

int g_digits = 10;

std::string num(double v) {
    std::ostringstream os;
    os.precision(g_digits);
    os << v;
    return os.str();
}

unsigned default_threads() {
    if (const char* env = std::getenv("QCAP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return 0;  // modules fall back to hardware concurrency
}

struct ChannelOpts {
    std::vector<double> pauli;
    std::string affine;
    std::string shift;
    std::string file;
    std::string name;
};

void add_channel_flags(CLI::App* cmd, ChannelOpts& opts) {
    cmd->add_option("--pauli", opts.pauli, "Kraus probabilities p0,px,py,pz")->delimiter(',');
    cmd->add_option("--affine", opts.affine, "3x3 linear part, rows separated by ';'");
    cmd->add_option("--shift", opts.shift, "affine shift 'tx ty tz'");
    cmd->add_option("--channel-file", opts.file, "channel spec file (one per line)");
    cmd->add_option("--name", opts.name, "channel name to pick from the file");
}

qcap::QubitChannel resolve_channel(const ChannelOpts& opts) {
    if (!opts.pauli.empty()) {
        if (opts.pauli.size() != 4) throw CLI::ValidationError("--pauli needs 4 probabilities");
        return qcap::pauli_channel(opts.pauli[0], opts.pauli[1], opts.pauli[2], opts.pauli[3]);
    }
    if (!opts.affine.empty()) {
        qcap::QubitChannel c;
        std::string flat = opts.affine;
        for (auto& ch : flat)
            if (ch == ';' || ch == ',') ch = ' ';
        std::istringstream is(flat);
        for (int r = 0; r < 3; ++r)
            for (int col = 0; col < 3; ++col)
                if (!(is >> c.linear[r][col]))
                    throw CLI::ValidationError("--affine needs 9 numbers");
        if (!opts.shift.empty()) {
            std::string sh = opts.shift;
            for (auto& ch : sh)
                if (ch == ',') ch = ' ';
            std::istringstream ss(sh);
            if (!(ss >> c.shift[0] >> c.shift[1] >> c.shift[2]))
                throw CLI::ValidationError("--shift needs 3 numbers");
        }
        return c;
    }
    if (!opts.file.empty()) {
        const auto channels = qcap::parse_channel_file(opts.file);
        if (channels.empty()) throw CLI::ValidationError("channel file is empty");
        if (opts.name.empty()) return channels.front();
        for (const auto& c : channels)
            if (c.name == opts.name) return c;
        throw CLI::ValidationError("channel '" + opts.name + "' not found in file");
    }
    throw CLI::ValidationError("no channel given (use --pauli, --affine or --channel-file)");
}

json capacity_json(const qcap::CapacityResult& res) {
    json ensemble = json::array();
    for (const auto& e : res.ensemble)
        ensemble.push_back({{"probability", e.probability},
                            {"bloch", {e.point.x, e.point.y, e.point.z}}});
    return {{"value", res.value},
            {"ensemble", std::move(ensemble)},
            {"average_output",
             {res.average_output.x, res.average_output.y, res.average_output.z}},
            {"certificate_gap", res.certificate_gap},
            {"error_bound", res.error_bound},
            {"k_used", res.k_used},
            {"converged", res.converged}};
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qcap: qubit channel capacity and entanglement toolkit"};
    app.require_subcommand(1);
    app.add_option("--digits", g_digits, "significant digits in printed numbers (max 17)")
        ->check(CLI::Range(1, 17));
    unsigned threads = default_threads();
    app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

    // --- capacity / engaging / lattice-convergence -------------------------
    ChannelOpts cap_ch, eng_ch, conv_ch, add_ch;
    double cap_tol = 1e-6;
    std::string cap_out;
    auto* cap = app.add_subcommand("capacity", "Holevo capacity of a qubit channel");
    add_channel_flags(cap, cap_ch);
    cap->add_option("--tol", cap_tol, "target accuracy");
    cap->add_option("--output", cap_out, "write the JSON record here");

    auto* eng = app.add_subcommand("engaging", "capacity-achieving (engaging) ensemble");
    add_channel_flags(eng, eng_ch);
    double eng_tol = 1e-6;
    eng->add_option("--tol", eng_tol, "target accuracy");

    auto* conv = app.add_subcommand("lattice-convergence",
                                    "restricted capacity along the lattice schedule");
    add_channel_flags(conv, conv_ch);
    std::vector<std::size_t> conv_ks{10, 20, 40, 80};
    std::string conv_out;
    conv->add_option("--ks", conv_ks, "lattice sizes")->delimiter(',');
    conv->add_option("--output", conv_out, "write the CSV here");

    auto* add = app.add_subcommand("additivity-scan",
                                   "divergence scan of two-copy Schmidt states");
    add_channel_flags(add, add_ch);
    std::size_t add_np = 17, add_na = 9;
    double add_tol = 1e-6;
    std::string add_out;
    add->add_option("--np", add_np, "grid points in the Schmidt weight p");
    add->add_option("--na", add_na, "grid points per angle");
    add->add_option("--tol", add_tol, "capacity accuracy for the reference");
    add->add_option("--output", add_out, "write the p-slice CSV here");

    // --- gap certificate ----------------------------------------------------
    auto* gap = app.add_subcommand("gap", "distillation-vs-cost gap certificate");
    std::vector<double> gap_p;
    gap->add_option("--p", gap_p, "Kraus probabilities p0,px,py,pz")->delimiter(',')->required();

    auto* gscan = app.add_subcommand("gap-scan", "scan the Kraus simplex for the gap region");
    double gscan_step = 0.05;
    std::string gscan_out;
    gscan->add_option("--step", gscan_step, "simplex grid step (<= 0.1)");
    gscan->add_option("--output", gscan_out, "write the CSV here");

    // --- superadditivity searches -------------------------------------------
    auto* sup = app.add_subcommand("superadd", "strong-superadditivity search");
    std::string sup_mode = "random";
    std::size_t sup_samples = 10000, sup_trials = 10;
    std::uint64_t sup_seed = 42;
    double sup_eps = 0.1;
    bool sup_square = false;
    std::string sup_out;
    sup->add_option("--mode", sup_mode, "random | zero | minimum")
        ->check(CLI::IsMember({"random", "zero", "minimum"}));
    sup->add_option("--samples", sup_samples, "sample count");
    sup->add_option("--seed", sup_seed, "master seed");
    sup->add_option("--epsilon", sup_eps, "perturbation size (zero mode)");
    sup->add_option("--trials", sup_trials, "descent trials (minimum mode)");
    sup->add_flag("--square", sup_square, "uniform square sampling instead of Gaussian");
    sup->add_option("--output", sup_out, "write the scatter CSV here");

    // --- antisymmetric suite -----------------------------------------------
    auto* anti = app.add_subcommand("antisym", "antisymmetric-state bounds and spectrum");
    std::size_t anti_d = 3, anti_n = 2, anti_samples = 10000;
    std::uint64_t anti_seed = 7;
    std::vector<double> anti_p{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    anti->add_option("--d", anti_d, "local dimension");
    anti->add_option("--n", anti_n, "number of antisymmetric pairs");
    anti->add_option("--samples", anti_samples, "random states for the eigenvalue bound");
    anti->add_option("--seed", anti_seed, "master seed");
    anti->add_option("--p", anti_p, "pair-state weights p1,p2,p3 (d=3)")->delimiter(',');

    // --- teleportation -------------------------------------------------------
    auto* tele = app.add_subcommand("teleport", "d-level teleportation round trip");
    std::size_t tele_d = 2;
    std::uint64_t tele_seed = 1;
    bool tele_exh = false;
    tele->add_option("--d", tele_d, "level count");
    tele->add_option("--seed", tele_seed, "seed for the input state / outcome draw");
    tele->add_flag("--exhaustive", tele_exh, "report every measurement branch");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cap->parsed()) {
            const auto res = qcap::capacity(resolve_channel(cap_ch), cap_tol);
            json j = capacity_json(res);
            emit(j.dump(2) + "\n", cap_out);
            if (!cap_out.empty())
                std::cout << "capacity " << num(res.value) << " (k=" << res.k_used
                          << ", gap=" << num(res.certificate_gap) << ")\n";
            return 0;
        }
        if (eng->parsed()) {
            const auto res = qcap::capacity(resolve_channel(eng_ch), eng_tol);
            std::cout << "capacity " << num(res.value) << "\n";
            std::cout << "engaging inputs (" << res.ensemble.size() << "):\n";
            for (const auto& e : res.ensemble)
                std::cout << "  w=" << num(e.probability) << "  bloch=(" << num(e.point.x) << ", "
                          << num(e.point.y) << ", " << num(e.point.z) << ")\n";
            return 0;
        }
        if (conv->parsed()) {
            const auto channel = resolve_channel(conv_ch);
            std::ostringstream csv;
            csv << "# lattice-convergence channel=" << qcap::serialize_channel(channel) << "\n";
            csv << "k,restricted,refined,certificate_gap\n";
            for (std::size_t k : conv_ks) {
                const auto lat = qcap::build_lattice(k);
                const auto res = qcap::restricted_capacity(channel, lat, 1e-10);
                qcap::CapacityResult ref;
                try {
                    ref = qcap::refine_capacity(channel, res, 1e-11);
                } catch (const std::exception&) {
                    ref = res;
                }
                csv.precision(12);
                csv << k << ',' << res.value << ',' << ref.value << ',' << res.certificate_gap
                    << "\n";
            }
            emit(csv.str(), conv_out);
            return 0;
        }
        if (add->parsed()) {
            const auto channel = resolve_channel(add_ch);
            const auto cres = qcap::capacity(channel, add_tol);
            const auto scan =
                qcap::additivity_scan(channel, cres.average_output, add_np, add_na, threads);
            const double bound = 2.0 * cres.value;
            std::cout << "single-copy capacity " << num(cres.value) << "\n";
            std::cout << "scan max " << num(scan.max_divergence) << " over " << scan.evaluated
                      << " states (bound 2C=" << num(bound) << ")\n";
            std::cout << "argmax p=" << num(scan.argmax.p) << " theta_u=" << num(scan.argmax.theta_u)
                      << " phi_u=" << num(scan.argmax.phi_u) << " theta_v=" << num(scan.argmax.theta_v)
                      << " phi_v=" << num(scan.argmax.phi_v) << " nu=" << num(scan.argmax.nu) << "\n";
            if (!add_out.empty()) {
                std::ostringstream csv;
                csv << "# additivity p-slice at argmax angles\np,divergence\n";
                csv.precision(12);
                for (const auto& [p, v] : scan.p_slice) csv << p << ',' << v << "\n";
                emit(csv.str(), add_out);
            }
            return scan.max_divergence > bound + 1e-6 ? 2 : 0;
        }
        if (gap->parsed()) {
            if (gap_p.size() != 4) throw CLI::ValidationError("--p needs 4 probabilities");
            const auto rep = qcap::gap_condition(gap_p[0], gap_p[1], gap_p[2], gap_p[3]);
            std::cout << "t0 " << num(rep.t0) << "\nE_N " << num(rep.e_n) << "\nE_C "
                      << num(rep.e_c) << "\ncondition " << num(rep.condition_value)
                      << "\ngap_holds " << (rep.gap_holds ? "true" : "false") << "\n";
            return rep.gap_holds ? 2 : 0;
        }
        if (gscan->parsed()) {
            const auto rows = qcap::gap_region_scan(gscan_step);
            emit(qcap::gap_scan_csv(rows, gscan_step), gscan_out);
            for (const auto& r : rows)
                if (r.gap_holds) return 2;
            return 0;
        }
        if (sup->parsed()) {
            if (sup_mode == "minimum") {
                double worst = 1e300;
                bool found = false;
                for (std::size_t t = 0; t < sup_trials; ++t) {
                    const auto res = qcap::minimum_search(sup_seed + t);
                    worst = std::min(worst, res.final_margin);
                    std::cout << "trial " << t << ": final margin " << num(res.final_margin)
                              << ", schmidt max " << num(res.final_schmidt_max) << "\n";
                    if (res.final_margin < -1e-9) found = true;
                }
                std::cout << "worst margin " << num(worst) << "\n";
                return found ? 2 : 0;
            }
            qcap::SearchReport rep;
            if (sup_mode == "random")
                rep = qcap::random_search(sup_samples, sup_seed, sup_square, threads);
            else
                rep = qcap::zero_neighborhood_search(sup_eps, sup_samples, sup_seed, threads);
            std::cout << "mode " << rep.mode << ": " << rep.violations << " violations in "
                      << rep.samples << " samples, min margin " << num(rep.min_margin) << "\n";
            if (!sup_out.empty()) emit(qcap::scatter_csv(rep), sup_out);
            return rep.violations > 0 ? 2 : 0;
        }
        if (anti->parsed()) {
            std::cout << "E_C lower bound log2(d/(d-1)) = " << num(qcap::antisym_lower_bound(anti_d))
                      << "\n";
            if (anti_d == 3 && anti_p.size() == 3) {
                const auto sp = qcap::antisym_pair_spectrum(anti_p[0], anti_p[1], anti_p[2]);
                std::cout << "pair-state entropy " << num(sp.entropy) << "\nspectrum";
                for (double lam : sp.eigenvalues) std::cout << ' ' << num(lam);
                std::cout << "\n";
            }
            const double bound = std::pow(1.0 - 1.0 / static_cast<double>(anti_d),
                                          static_cast<double>(anti_n));
            double max_seen = 0.0;
            for (std::size_t i = 0; i < anti_samples; ++i) {
                qcap::Rng rng = qcap::Rng::substream(anti_seed, i);
                const auto psi = qcap::random_antisym_state(anti_d, anti_n, rng);
                max_seen = std::max(max_seen, qcap::max_reduced_eigenvalue(psi, anti_d, anti_n));
            }
            std::cout << "max reduced eigenvalue over " << anti_samples << " samples: "
                      << num(max_seen) << " (bound " << num(bound) << ")\n";
            return max_seen > bound + 1e-9 ? 2 : 0;
        }
        if (tele->parsed()) {
            qcap::Rng rng(tele_seed);
            const auto psi = qcap::random_pure_state(tele_d, rng);
            if (tele_exh) {
                double worst = 1.0;
                for (const auto& o : qcap::teleport_all_outcomes(tele_d, psi)) {
                    std::cout << "outcome (" << o.x << "," << o.y << "): fidelity "
                              << num(o.fidelity) << " probability " << num(o.probability) << "\n";
                    worst = std::min(worst, o.fidelity);
                }
                std::cout << "min fidelity " << num(worst) << "\n";
            } else {
                const auto res = qcap::teleport_roundtrip(tele_d, psi, tele_seed + 1);
                std::cout << "outcome (" << res.outcome.x << "," << res.outcome.y
                          << "): fidelity " << num(res.outcome.fidelity) << "\n";
            }
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
