/*
 * Command-line front end: parameter sweeps over N, threshold extraction,
 * seeded Monte Carlo sessions, and CRP-table management. All numeric output
 * carries 17 significant digits; identical invocations produce identical
 * bytes.
 */
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvauth/cvauth.hpp"

namespace {

struct OutputTarget {
    std::ostream& stream() { return file ? *file : std::cout; }
    std::unique_ptr<std::ofstream> file;
};

OutputTarget open_output(const std::string& path) {
    OutputTarget t;
    if (!path.empty() && path != "-") {
        t.file = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*t.file) throw std::runtime_error("cannot open output file " + path);
    }
    return t;
}

std::vector<cvauth::Attack> parse_attacks(const std::string& csv) {
    std::vector<cvauth::Attack> out;
    if (csv.empty() || csv == "none") return out;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) {
        if (!cur.empty()) out.push_back(cvauth::attack_from_name(cur));
    }
    return out;
}

// Shared parameter flags; mu_response comes from exactly one of --mu-r and
// --loss-ratio.
struct ParamFlags {
    double mu_p = 0.0;
    double mu_r = -1.0;
    double loss_ratio = -1.0;
    double eta = 0.5;
    double delta_sigma = 2.0;
    double epsilon = 1e-3;
    double gap_scale = cvauth::kTwoSqrt2;

    void add_to(CLI::App* cmd, bool require_mu_p = true) {
        auto* p = cmd->add_option("--mu-p", mu_p, "mean photon number of the probe");
        if (require_mu_p) p->required();
        auto* mr = cmd->add_option("--mu-r", mu_r, "mean photon number of the response");
        auto* lr = cmd->add_option("--loss-ratio", loss_ratio,
                                   "mu_response as a fraction of mu_probe");
        mr->excludes(lr);
        lr->excludes(mr);
        cmd->add_option("--eta", eta, "detection efficiency in (0, 1]")->capture_default_str();
        cmd->add_option("--delta-sigma", delta_sigma, "bin width in units of sigma")
            ->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "accept threshold on |p_in - P_in0|")
            ->capture_default_str();
        cmd->add_option("--gap-scale", gap_scale,
                        "normalization of the emulated-response mean gap (1 = physical)")
            ->capture_default_str();
    }

    cvauth::ProtocolParams to_params() const {
        if ((mu_r < 0.0) == (loss_ratio < 0.0)) {
            throw CLI::ValidationError("exactly one of --mu-r and --loss-ratio is required");
        }
        cvauth::ProtocolParams p;
        p.mu_probe = mu_p;
        p.mu_response = mu_r >= 0.0 ? mu_r : loss_ratio * mu_p;
        p.eta = eta;
        p.delta_over_sigma = delta_sigma;
        p.epsilon = epsilon;
        p.gap_scale = gap_scale;
        return p;
    }
};

int cmd_sweep_or_threshold(const ParamFlags& flags, const std::string& grid_text,
                           const std::string& attacks_csv, bool no_bound,
                           const std::string& format, const std::string& out_path,
                           std::uint64_t seed, std::optional<double> two_epsilon) {
    cvauth::SweepSpec spec;
    spec.n_grid = cvauth::parse_grid(grid_text);
    spec.base = flags.to_params();
    spec.base.n_states = spec.n_grid.front();
    spec.attacks = parse_attacks(attacks_csv);
    spec.include_lower_bound = !no_bound;
    spec.validate();
    auto rows = cvauth::run_sweep(spec);
    OutputTarget out = open_output(out_path);
    if (two_epsilon) {
        auto entries = cvauth::thresholds(rows, *two_epsilon);
        if (format == "json") {
            cvauth::write_thresholds_json(entries, *two_epsilon, out.stream(), spec.base, seed);
        } else {
            cvauth::write_thresholds_csv(entries, *two_epsilon, out.stream());
        }
    } else {
        if (format == "json") {
            cvauth::write_sweep_json(spec, rows, out.stream(), seed);
        } else {
            cvauth::write_sweep_csv(spec, rows, out.stream());
        }
    }
    return 0;
}

int cmd_simulate(const ParamFlags& flags, int n, std::uint64_t queries, std::uint64_t seed,
                 std::uint64_t repetitions, const std::string& attack_name_text,
                 const std::string& mode_text, const std::string& transcript_path,
                 const std::string& format, const std::string& out_path) {
    cvauth::SessionConfig cfg;
    cfg.params = flags.to_params();
    cfg.params.n_states = n;
    cfg.params.n_queries = queries;
    cfg.seed = seed;
    if (attack_name_text == "none") {
        cfg.model = cvauth::AdversaryModel::kHonest;
    } else {
        cfg.attack = cvauth::attack_from_name(attack_name_text);
        if (mode_text == "physical-dh") {
            cfg.model = cvauth::AdversaryModel::kPhysicalDH;
        } else if (mode_text == "confusion") {
            cfg.model = cvauth::AdversaryModel::kConfusion;
        } else {
            throw CLI::ValidationError("unknown adversary mode " + mode_text);
        }
    }
    cfg.validate();
    if (repetitions == 0) throw CLI::ValidationError("--repetitions must be positive");

    cvauth::CRPTable table = cvauth::table_for(
        cfg.params, cvauth::ResponsePhaseMap::symmetric_default(cfg.params.n_states));

    double analytic = cvauth::p_in_honest(cfg.params);
    if (cfg.model != cvauth::AdversaryModel::kHonest) {
        cvauth::Attack a =
            cfg.model == cvauth::AdversaryModel::kPhysicalDH ? cvauth::Attack::kDH : cfg.attack;
        analytic = cvauth::attack_deviation(a, cfg.params, table).p_in_attacked;
    }

    std::uint64_t accepted = 0;
    cvauth::KahanSum p_in_sum;
    for (std::uint64_t r = 0; r < repetitions; ++r) {
        cvauth::SessionConfig run_cfg = cfg;
        run_cfg.session_index = r;
        cvauth::SessionResult res;
        if (r == 0 && !transcript_path.empty()) {
            cvauth::HarnessResult h = cvauth::run_actor_harness(run_cfg, table);
            res = h.session;
            std::ofstream tout(transcript_path, std::ios::binary);
            if (!tout) throw std::runtime_error("cannot open transcript file " + transcript_path);
            cvauth::write_transcript(h.transcript, tout);
        } else {
            res = cvauth::run_session(run_cfg, table);
        }
        if (res.accepted) ++accepted;
        p_in_sum.add(res.p_in_hat);
    }
    double accept_rate = static_cast<double>(accepted) / static_cast<double>(repetitions);
    double mean_p_in = p_in_sum.value() / static_cast<double>(repetitions);

    OutputTarget out = open_output(out_path);
    auto g = [](double x) { return cvauth::detail::format_g17(x); };
    if (format == "json") {
        out.stream() << "{\"kind\":\"simulate\",\"metadata\":";
        cvauth::detail::metadata_json(cfg.params, seed, out.stream());
        out.stream() << ",\"n\":" << cfg.params.n_states << ",\"queries\":" << queries
                     << ",\"repetitions\":" << repetitions << ",\"attack\":\""
                     << (cfg.model == cvauth::AdversaryModel::kHonest
                             ? "none"
                             : cvauth::attack_name(cfg.attack))
                     << "\",\"adversary_mode\":\"" << cvauth::adversary_model_name(cfg.model)
                     << "\",\"accept_rate\":" << g(accept_rate)
                     << ",\"mean_p_in\":" << g(mean_p_in) << ",\"analytic_p_in\":" << g(analytic)
                     << ",\"p_in_honest\":" << g(cvauth::p_in_honest(cfg.params))
                     << ",\"abs_diff\":" << g(std::abs(mean_p_in - analytic)) << "}\n";
    } else {
        out.stream() << "n,queries,repetitions,attack,adversary_mode,accept_rate,mean_p_in,"
                        "analytic_p_in,p_in_honest,abs_diff\n";
        out.stream() << cfg.params.n_states << ',' << queries << ',' << repetitions << ','
                     << (cfg.model == cvauth::AdversaryModel::kHonest
                             ? "none"
                             : cvauth::attack_name(cfg.attack))
                     << ',' << cvauth::adversary_model_name(cfg.model) << ',' << g(accept_rate)
                     << ',' << g(mean_p_in) << ',' << g(analytic) << ','
                     << g(cvauth::p_in_honest(cfg.params)) << ','
                     << g(std::abs(mean_p_in - analytic)) << '\n';
    }
    return 0;
}

int cmd_table_generate(int n, double mu_r, const std::string& table_id, const std::string& chi_kind,
                       std::uint64_t chi_seed, const std::string& out_path) {
    cvauth::ResponsePhaseMap map;
    if (chi_kind == "symmetric") {
        map = cvauth::ResponsePhaseMap::symmetric_default(n);
    } else if (chi_kind == "random") {
        map = cvauth::ResponsePhaseMap::seeded_random(n, chi_seed);
    } else {
        throw CLI::ValidationError("unknown chi kind " + chi_kind);
    }
    cvauth::CRPTable t = cvauth::build_crp_table(table_id, mu_r, map);
    OutputTarget out = open_output(out_path);
    cvauth::write_crp(t, out.stream());
    return 0;
}

int cmd_table_inspect(const std::string& in_path, const std::string& out_path) {
    OutputTarget out = open_output(out_path);
    try {
        cvauth::CRPTable t = cvauth::read_crp_file(in_path);
        out.stream() << "ok,table_id=" << t.table_id << ",n_states=" << t.n_states
                     << ",mu_response=" << cvauth::detail::format_g17(t.mu_response)
                     << ",provenance=" << cvauth::provenance_name(t.provenance)
                     << ",seed=" << t.seed << ",rows=" << t.rows.size() << '\n';
    } catch (const std::exception& e) {
        out.stream() << "invalid," << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"security analysis for a continuous-variable authentication protocol"};
    app.require_subcommand(1);

    std::string grid_text;
    std::string attacks_csv = "dh,ud,sr";
    std::string format = "csv";
    std::string out_path = "-";
    bool no_bound = false;
    std::uint64_t seed = 0;
    double two_epsilon = 0.0;

    ParamFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "deviation and lower bound over a grid of N");
    sweep->add_option("--n-grid", grid_text, "N grid, lo:hi[:step] or comma list")->required();
    sweep_flags.add_to(sweep);
    sweep->add_option("--attacks", attacks_csv, "comma list from {dh,ud,sr}, or none")
        ->capture_default_str();
    sweep->add_flag("--no-bound", no_bound, "omit the lower-bound columns");
    sweep->add_option("--seed", seed, "echoed into json metadata")->capture_default_str();
    sweep->add_option("--format", format, "csv or json")->capture_default_str();
    sweep->add_option("--out", out_path, "output path, - for stdout")->capture_default_str();

    ParamFlags thr_flags;
    auto* thr = app.add_subcommand("threshold", "first N whose deviation exceeds 2 epsilon");
    thr->add_option("--n-grid", grid_text, "N grid, lo:hi[:step] or comma list")->required();
    thr_flags.add_to(thr);
    thr->add_option("--two-epsilon", two_epsilon, "detection margin 2 epsilon")->required();
    thr->add_option("--attacks", attacks_csv, "comma list from {dh,ud,sr}, or none")
        ->capture_default_str();
    thr->add_option("--seed", seed, "echoed into json metadata")->capture_default_str();
    thr->add_option("--format", format, "csv or json")->capture_default_str();
    thr->add_option("--out", out_path, "output path, - for stdout")->capture_default_str();

    ParamFlags sim_flags;
    int sim_n = 2;
    std::uint64_t queries = 100000;
    std::uint64_t repetitions = 1;
    std::string sim_attack = "none";
    std::string sim_mode = "confusion";
    std::string transcript_path;
    auto* sim = app.add_subcommand("simulate", "seeded Monte Carlo verification sessions");
    sim->add_option("--n", sim_n, "alphabet size N")->required();
    sim_flags.add_to(sim);
    sim->add_option("--queries", queries, "queries per session (M)")->capture_default_str();
    sim->add_option("--seed", seed, "master seed")->capture_default_str();
    sim->add_option("--repetitions", repetitions, "number of sessions")->capture_default_str();
    sim->add_option("--attack", sim_attack, "none, dh, ud, or sr")->capture_default_str();
    sim->add_option("--adversary-mode", sim_mode, "confusion or physical-dh")
        ->capture_default_str();
    sim->add_option("--transcript", transcript_path, "write the first session's transcript here");
    sim->add_option("--format", format, "csv or json")->capture_default_str();
    sim->add_option("--out", out_path, "output path, - for stdout")->capture_default_str();

    auto* table = app.add_subcommand("table", "CRP table management");
    table->require_subcommand(1);
    int tab_n = 2;
    double tab_mu_r = 0.0;
    std::string table_id = "crp0";
    std::string chi_kind = "symmetric";
    std::uint64_t chi_seed = 0;
    std::string in_path;
    auto* gen = table->add_subcommand("generate", "write a CRP table file");
    gen->add_option("--n", tab_n, "alphabet size N")->required();
    gen->add_option("--mu-r", tab_mu_r, "mean photon number of the response")->required();
    gen->add_option("--table-id", table_id, "table identifier")->capture_default_str();
    gen->add_option("--chi", chi_kind, "symmetric or random")->capture_default_str();
    gen->add_option("--chi-seed", chi_seed, "seed for --chi random")->capture_default_str();
    gen->add_option("--out", out_path, "output path, - for stdout")->capture_default_str();
    auto* ins = table->add_subcommand("inspect", "validate a CRP table file and print its header");
    ins->add_option("--in", in_path, "table file to inspect")->required();
    ins->add_option("--out", out_path, "output path, - for stdout")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            return cmd_sweep_or_threshold(sweep_flags, grid_text, attacks_csv, no_bound, format,
                                          out_path, seed, std::nullopt);
        }
        if (thr->parsed()) {
            return cmd_sweep_or_threshold(thr_flags, grid_text, attacks_csv, no_bound, format,
                                          out_path, seed, two_epsilon);
        }
        if (sim->parsed()) {
            return cmd_simulate(sim_flags, sim_n, queries, seed, repetitions, sim_attack, sim_mode,
                                transcript_path, format, out_path);
        }
        if (gen->parsed()) {
            return cmd_table_generate(tab_n, tab_mu_r, table_id, chi_kind, chi_seed, out_path);
        }
        if (ins->parsed()) {
            return cmd_table_inspect(in_path, out_path);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
