#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>

#include "fk/bounds.hpp"
#include "fk/bulk.hpp"
#include "fk/io.hpp"
#include "fk/lattice.hpp"
#include "fk/rng.hpp"
#include "fk/segregation.hpp"
#include "fk/spectral.hpp"
#include "fk/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct GlobalOpts {
    std::string config_file;
    std::uint64_t seed = 0;
    std::string out = "out";
    int quadrature_points = 0;  // 0: per-dimension default
    int eigensolver_cap = fk::kDefaultEigensolveCap;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, sep)) out.push_back(tok);
    return out;
}

fk::Torus parse_torus(const std::string& spec) {
    std::vector<int> dims;
    for (const std::string& tok : split(spec, 'x')) dims.push_back(std::stoi(tok));
    return fk::Torus(std::move(dims));
}

double parse_u(const std::string& u) {
    if (u == "inf" || u == "infinity") return kInf;
    return std::stod(u);
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    if (csv.empty()) return out;
    for (const std::string& tok : split(csv, ',')) out.push_back(std::stod(tok));
    return out;
}

const fk::BulkModel& bulk_for(int d, const GlobalOpts& g) {
    return g.quadrature_points > 0 ? fk::shared_bulk_model(d, g.quadrature_points)
                                   : fk::shared_bulk_model(d);
}

json u_json(double u) { return std::isinf(u) ? json("inf") : json(u); }

// ---------------------------------------------------------------------------

int run_spectrum(const GlobalOpts& g, const std::string& domain_file, const std::string& u_str,
                 bool with_eigenvectors) {
    const fk::Domain domain = fk::parse_domain(fk::read_file(domain_file));
    const double u = parse_u(u_str);

    fk::LatticeOperator op;
    if (std::isinf(u)) {
        op = fk::build_dirichlet(domain);
    } else {
        if (!domain.ambient())
            throw std::invalid_argument("spectrum: finite U needs a torus-embedded domain");
        op = fk::build_screened(*domain.ambient(), domain, u);
    }
    fk::Spectrum spec = fk::eigensolve(op, g.eigensolver_cap);

    std::string csv = "index,eigenvalue\n";
    for (int j = 0; j < spec.eigenvalues.size(); ++j)
        csv += fk::csv_row({std::to_string(j + 1), fk::format_double(spec.eigenvalues[j])});
    fk::atomic_write_file(fs::path(g.out) / "spectrum.csv", csv);

    if (with_eigenvectors) {
        std::string vec_csv;
        for (int row = 0; row < spec.eigenvectors.rows(); ++row) {
            std::vector<std::string> cells;
            for (int col = 0; col < spec.eigenvectors.cols(); ++col)
                cells.push_back(fk::format_double(spec.eigenvectors(row, col)));
            vec_csv += fk::csv_row(cells);
        }
        fk::atomic_write_file(fs::path(g.out) / "eigenvectors.csv", vec_csv);
    }

    json config{{"domain", domain_file},
                {"domain_hash", fk::domain_hash(domain)},
                {"U", u_json(u)},
                {"eigenvectors", with_eigenvectors},
                {"eigensolver_cap", g.eigensolver_cap},
                {"seed", g.seed}};
    fk::write_manifest(g.out, "spectrum", config);
    return 0;
}

int run_bulk(const GlobalOpts& g, int d, const std::string& n_csv, const std::string& beta_csv,
             const std::string& mu_csv) {
    const fk::BulkModel& model = bulk_for(d, g);
    std::vector<double> fillings = parse_list(n_csv);
    std::vector<double> betas = parse_list(beta_csv);
    std::vector<double> mus = parse_list(mu_csv);
    if (fillings.empty() && (betas.empty() || mus.empty()))
        for (int i = 1; i <= 19; ++i) fillings.push_back(0.05 * i);

    if (!fillings.empty()) {
        std::string csv = "n,eps_F,e_n\n";
        std::string err_csv = "n,e_err\n";
        for (double n : fillings) {
            csv += fk::csv_row({fk::format_double(n), fk::format_double(model.fermi_level(n)),
                                fk::format_double(model.energy(n))});
            err_csv += fk::csv_row({fk::format_double(n), fk::format_double(model.energy_error(n))});
        }
        fk::atomic_write_file(fs::path(g.out) / "bulk_energy.csv", csv);
        fk::atomic_write_file(fs::path(g.out) / "bulk_energy_error.csv", err_csv);
    }
    if (!betas.empty() && !mus.empty()) {
        std::string csv = "beta,mu,f\n";
        for (double beta : betas)
            for (double mu : mus)
                csv += fk::csv_row({fk::format_double(beta), fk::format_double(mu),
                                    fk::format_double(model.free_energy(beta, mu))});
        fk::atomic_write_file(fs::path(g.out) / "free_energy.csv", csv);
    }

    json config{{"d", d},
                {"quadrature_points", model.pts_per_axis()},
                {"n", fillings},
                {"beta", betas},
                {"mu", mus},
                {"seed", g.seed}};
    fk::write_manifest(g.out, "bulk", config);
    return 0;
}

int run_enumerate(const GlobalOpts& g, const std::string& torus_spec, int holes,
                  std::uint64_t cap) {
    const fk::Torus torus = parse_torus(torus_spec);
    if (holes <= 0 || holes > torus.volume())
        throw std::invalid_argument("enumerate: need 0 < holes <= torus volume");

    std::string csv = "index,sites\n";
    long long count = 0;
    fk::enumerate_domains(torus, holes, [&](const fk::Domain& dom) {
        std::string sites;
        for (std::size_t i = 0; i < dom.sites().size(); ++i) {
            if (i) sites += ";";
            for (std::size_t j = 0; j < dom.sites()[i].size(); ++j) {
                if (j) sites += " ";
                sites += std::to_string(dom.sites()[i][j]);
            }
        }
        csv += fk::csv_row({std::to_string(count++), sites});
    }, cap);
    fk::atomic_write_file(fs::path(g.out) / "domains.csv", csv);
    fk::atomic_write_file(fs::path(g.out) / "count.json",
                          json{{"count", count}}.dump(2) + "\n");

    json config{{"torus", torus_spec}, {"holes", holes}, {"cap", cap}, {"seed", g.seed}};
    fk::write_manifest(g.out, "enumerate", config);
    return 0;
}

void emit_reports(const GlobalOpts& g, const std::string& subcommand,
                  const std::vector<fk::BoundReport>& reports, const json& config) {
    std::string jsonl, csv = "name,lhs,rhs,slack,tol,pass\n";
    for (const auto& r : reports) {
        jsonl += r.to_json().dump() + "\n";
        csv += fk::csv_row({r.name, fk::format_double(r.lhs), fk::format_double(r.rhs),
                            fk::format_double(r.slack), fk::format_double(r.tol),
                            r.pass ? "true" : "false"});
    }
    fk::atomic_write_file(fs::path(g.out) / "reports.jsonl", jsonl);
    fk::atomic_write_file(fs::path(g.out) / "summary.csv", csv);
    fk::write_manifest(g.out, subcommand, config);
}

int run_bounds(const GlobalOpts& g, const std::string& check, const std::string& domain_file,
               int n_electrons, const std::string& u_str, double beta, double mu, int d,
               double eps_f, const std::string& k_csv, double eps_val) {
    const double u = parse_u(u_str);
    std::vector<fk::BoundReport> reports;

    std::optional<fk::Domain> domain;
    if (!domain_file.empty()) domain = fk::parse_domain(fk::read_file(domain_file));

    auto add = [&](const std::vector<fk::BoundReport>& rs) {
        reports.insert(reports.end(), rs.begin(), rs.end());
    };
    auto need_domain = [&]() -> const fk::Domain& {
        if (!domain) throw std::invalid_argument("bounds: this check needs --domain");
        return *domain;
    };
    auto need_embedded = [&]() -> const fk::Domain& {
        const fk::Domain& dom = need_domain();
        if (!dom.ambient())
            throw std::invalid_argument("bounds: this check needs a torus-embedded domain");
        return dom;
    };

    auto run_one = [&](const std::string& name) {
        if (name == "dispersion-window") {
            reports.push_back(fk::dispersion_window_check(d, d >= 3 ? 17 : 65));
        } else if (name == "constants-asymptotics") {
            add(fk::constants_asymptotics_check(d));
        } else if (name == "singular-integral") {
            if (std::isnan(eps_f)) {
                reports.push_back(fk::singular_integral_check(d, 0.5));
                reports.push_back(fk::singular_integral_check(d, 2.0 * d));
            } else {
                reports.push_back(fk::singular_integral_check(d, eps_f));
            }
        } else if (name == "bulk-energy-floor") {
            reports.push_back(fk::bulk_energy_floor_check(bulk_for(d, g),
                                                          {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}));
        } else if (name == "fermi-surface-positivity") {
            if (std::isnan(eps_f)) {
                for (double ef : {0.5, 1.0, 2.0, 4.0})
                    reports.push_back(fk::fermi_surface_positivity_check(ef));
            } else {
                reports.push_back(fk::fermi_surface_positivity_check(eps_f));
            }
        } else if (name == "energy-sandwich") {
            const fk::Domain& dom = need_domain();
            const int n_el = n_electrons >= 0 ? n_electrons : static_cast<int>(dom.size()) / 2;
            if (std::isinf(u)) {
                add(fk::energy_sandwich_check(dom, n_el, bulk_for(dom.dimension(), g)));
            } else {
                const fk::Domain& emb = need_embedded();
                add(fk::energy_sandwich_check(*emb.ambient(), emb, n_el, u,
                                              bulk_for(emb.dimension(), g)));
            }
        } else if (name == "energy-lower-screened") {
            const fk::Domain& dom = need_embedded();
            const int n_el = n_electrons >= 0 ? n_electrons : static_cast<int>(dom.size()) / 2;
            reports.push_back(fk::screened_lower_check(*dom.ambient(), dom, n_el, u));
        } else if (name == "free-energy-sandwich") {
            const fk::Domain& dom = need_embedded();
            add(fk::free_energy_sandwich_check(*dom.ambient(), dom, beta, mu, u,
                                               bulk_for(dom.dimension(), g)));
        } else if (name == "decorrelation") {
            const fk::Domain& dom = need_embedded();
            reports.push_back(fk::decorrelation_check(*dom.ambient(), dom.sites(), beta, mu, u));
        } else if (name == "free-energy-surface") {
            const fk::Domain& dom = need_domain();
            reports.push_back(
                fk::free_energy_surface_check(dom, beta, mu, bulk_for(dom.dimension(), g)));
        } else if (name == "majorization") {
            const fk::Domain& dom = need_domain();
            const fk::BulkModel& bulk = bulk_for(dom.dimension(), g);
            fk::Spectrum s = fk::eigensolve(fk::build_dirichlet(dom), g.eigensolver_cap);
            auto estar = bulk.level_set_averages(static_cast<int>(dom.size()));
            Eigen::VectorXd ep =
                Eigen::Map<Eigen::VectorXd>(estar.data(), static_cast<Eigen::Index>(estar.size()));
            const double tol = dom.size() * bulk.energy_error(1.0) + 1e-8;
            add(fk::majorization_check(s.eigenvalues, ep, beta, mu, tol, tol));
        } else if (name == "gradient-bounds") {
            const fk::Domain& dom = need_domain();
            std::vector<double> k = parse_list(k_csv);
            if (k.empty()) {
                fk::Rng rng(g.seed);
                for (int i = 0; i < dom.dimension(); ++i)
                    k.push_back((rng.uniform() * 2 - 1) * M_PI / 3);
            }
            add(fk::gradient_bound_checks(dom, k, eps_val));
        } else {
            throw std::invalid_argument("bounds: unknown check '" + name + "'");
        }
    };

    if (check == "all") {
        for (int dd : {1, 2, 3}) {
            reports.push_back(fk::dispersion_window_check(dd, dd >= 3 ? 17 : 65));
            add(fk::constants_asymptotics_check(dd));
        }
        for (int dd : {1, 2}) {
            reports.push_back(fk::singular_integral_check(dd, 0.5));
            reports.push_back(fk::singular_integral_check(dd, 2.0 * dd));
            reports.push_back(fk::bulk_energy_floor_check(bulk_for(dd, g),
                                                          {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}));
        }
        for (double ef : {0.5, 1.0, 2.0, 4.0})
            reports.push_back(fk::fermi_surface_positivity_check(ef));
        if (domain) {
            run_one("energy-sandwich");
            run_one("free-energy-surface");
            run_one("majorization");
            if (!domain->ambient()) run_one("gradient-bounds");
        }
    } else {
        for (const std::string& name : split(check, ',')) run_one(name);
    }

    json config{{"check", check},
                {"domain", domain_file},
                {"N", n_electrons},
                {"U", u_json(u)},
                {"beta", beta},
                {"mu", mu},
                {"d", d},
                {"eps_f", std::isnan(eps_f) ? json() : json(eps_f)},
                {"k", k_csv},
                {"eps", eps_val},
                {"quadrature_points", g.quadrature_points},
                {"seed", g.seed}};
    emit_reports(g, "bounds", reports, config);

    bool ok = true;
    for (const auto& r : reports) {
        if (!r.pass) {
            ok = false;
            std::cerr << "FAIL: " << r.name << " slack=" << r.slack << " tol=" << r.tol << "\n";
        }
    }
    return ok ? 0 : 1;
}

int run_anneal(const GlobalOpts& g, const std::string& torus_spec, int holes, int electrons,
               double mu, double beta_e, const std::string& u_str, const std::string& schedule_csv,
               int steps, int chains, double burn_in) {
    const fk::Torus torus = parse_torus(torus_spec);
    if (holes <= 0 || holes > torus.volume())
        throw std::invalid_argument("anneal: need 0 < holes <= torus volume");

    fk::EnergyParams params;
    params.u = parse_u(u_str);
    if (electrons >= 0) {
        params.mode = fk::EnergyParams::Mode::ground;
        params.n_electrons = electrons;
        if (std::isinf(params.u) && electrons > holes)
            throw std::invalid_argument("anneal: electrons exceed holes at U = inf");
    } else if (!std::isnan(mu)) {
        params.mode = fk::EnergyParams::Mode::thermal;
        params.mu = mu;
        params.beta = beta_e;
    } else {
        throw std::invalid_argument("anneal: give --electrons or --mu");
    }

    fk::SamplerConfig cfg;
    cfg.params = params;
    cfg.beta_schedule = parse_list(schedule_csv);
    if (cfg.beta_schedule.empty()) throw std::invalid_argument("anneal: empty --schedule");
    cfg.steps_per_beta = steps;

    std::vector<std::vector<int>> displacements;
    for (int i = 0; i < torus.dimension(); ++i) {
        std::vector<int> z(torus.dimension(), 0);
        z[i] = 1;
        displacements.push_back(z);
    }

    fk::EnergyMemo memo;
    json chains_json = json::array();
    double mean_boundary_fraction = 0.0;
    for (int chain = 0; chain < chains; ++chain) {
        cfg.seed = fk::Rng::child_seed(g.seed, chain);
        fk::Rng start_rng(fk::Rng::child_seed(g.seed, 1000 + chain));
        std::vector<int> start = fk::random_holes(torus, holes, start_rng);
        fk::Trajectory traj = fk::metropolis_run(torus, start, cfg, &memo);

        std::string csv = "step,beta_s,energy,boundary_size,accepted\n";
        for (const auto& s : traj.steps)
            csv += fk::csv_row({std::to_string(s.step), fk::format_double(s.beta_s),
                                fk::format_double(s.energy), std::to_string(s.boundary_size),
                                s.accepted ? "1" : "0"});
        fk::atomic_write_file(fs::path(g.out) / ("trajectory_chain" + std::to_string(chain) + ".csv"),
                              csv);

        fk::Domain final_domain = fk::Configuration{traj.final_holes}.domain(torus);
        fk::atomic_write_file(fs::path(g.out) / ("final_chain" + std::to_string(chain) + ".dom"),
                              fk::serialize_domain(final_domain));

        fk::Observables obs = fk::trajectory_observables(torus, traj, displacements, burn_in);
        json dc = json::object();
        for (const auto& [z, value] : obs.delta_corr) {
            std::string key;
            for (std::size_t i = 0; i < z.size(); ++i) key += (i ? "," : "") + std::to_string(z[i]);
            dc[key] = value;
        }
        chains_json.push_back(json{{"chain", chain},
                                   {"seed", cfg.seed},
                                   {"final_energy", traj.final_energy},
                                   {"acceptance_rate", obs.acceptance_rate},
                                   {"boundary_fraction", obs.boundary_fraction},
                                   {"delta_corr", dc}});
        mean_boundary_fraction += obs.boundary_fraction / chains;
    }

    json observables{{"chains", chains_json},
                     {"mean_final_boundary_fraction", mean_boundary_fraction}};
    fk::atomic_write_file(fs::path(g.out) / "observables.json", observables.dump(2) + "\n");

    json config{{"torus", torus_spec},
                {"holes", holes},
                {"electrons", electrons},
                {"mu", std::isnan(mu) ? json() : json(mu)},
                {"beta_e", beta_e},
                {"U", u_json(params.u)},
                {"schedule", cfg.beta_schedule},
                {"steps", steps},
                {"chains", chains},
                {"burn_in", burn_in},
                {"seed", g.seed}};
    fk::write_manifest(g.out, "anneal", config);
    return 0;
}

int run_report(const GlobalOpts& g, const std::string& dir) {
    std::vector<fs::path> runs;
    std::vector<std::string> refused;
    if (fs::exists(fs::path(dir) / "manifest.json")) {
        runs.push_back(dir);
    } else if (fs::is_directory(dir)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (!entry.is_directory()) continue;
            if (fs::exists(entry.path() / "manifest.json"))
                runs.push_back(entry.path());
            else
                refused.push_back(entry.path().string());
        }
        std::sort(runs.begin(), runs.end());
    }

    struct Row {
        std::string run, name, status;
        double lhs = 0, rhs = 0, slack = 0, tol = 0;
    };
    std::vector<Row> rows;
    bool any_fail = false;
    for (const fs::path& run : runs) {
        const fs::path jsonl = run / "reports.jsonl";
        if (fs::exists(jsonl)) {
            std::istringstream in(fk::read_file(jsonl));
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                json r = json::parse(line);
                Row row{run.filename().string(), r["name"], r["pass"].get<bool>() ? "PASS" : "FAIL",
                        r["lhs"], r["rhs"], r["slack"], r["tol"]};
                if (row.status == "FAIL") any_fail = true;
                rows.push_back(std::move(row));
            }
        }
        const fs::path obs = run / "observables.json";
        if (fs::exists(obs)) {
            json o = json::parse(fk::read_file(obs));
            if (o.contains("mean_final_boundary_fraction")) {
                Row row{run.filename().string(), "mean-final-boundary-fraction", "INFO"};
                row.lhs = o["mean_final_boundary_fraction"].get<double>();
                rows.push_back(std::move(row));
            }
        }
    }

    std::string md = "# Run report\n\nversion: " + std::string(fk::version()) + "\n\n";
    if (!refused.empty()) {
        md += "Refused (no manifest):\n";
        for (const auto& r : refused) md += "- " + r + "\n";
        md += "\n";
    }
    md += "| run | check | lhs | rhs | slack | tol | status |\n";
    md += "|---|---|---|---|---|---|---|\n";
    std::string csv = "run,check,lhs,rhs,slack,tol,status\n";
    for (const Row& row : rows) {
        md += "| " + row.run + " | " + row.name + " | " + fk::format_double(row.lhs) + " | " +
              fk::format_double(row.rhs) + " | " + fk::format_double(row.slack) + " | " +
              fk::format_double(row.tol) + " | " + row.status + " |\n";
        csv += fk::csv_row({row.run, row.name, fk::format_double(row.lhs),
                            fk::format_double(row.rhs), fk::format_double(row.slack),
                            fk::format_double(row.tol), row.status});
    }
    fk::atomic_write_file(fs::path(g.out) / "report.md", md);
    fk::atomic_write_file(fs::path(g.out) / "report_summary.csv", csv);
    for (const auto& r : refused) std::cerr << "unmanifested artifact dir: " << r << "\n";
    return any_fail ? 1 : 0;
}

void take_last_everywhere(CLI::App* app) {
    for (CLI::Option* opt : app->get_options()) {
        if (opt->get_expected_min() > 0) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
    for (CLI::App* sub : app->get_subcommands({})) take_last_everywhere(sub);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice electron energy laboratory"};
    app.fallthrough(true);

    GlobalOpts g;
    app.add_option("--config", g.config_file, "JSON file with default option values");
    app.add_option("--seed", g.seed, "master RNG seed");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--quadrature-points", g.quadrature_points,
                   "zone quadrature points per axis (0 = per-dimension default)");
    app.add_option("--eigensolver-cap", g.eigensolver_cap, "largest matrix the solver accepts");
    app.require_subcommand(0, 1);

    // spectrum
    auto* sp = app.add_subcommand("spectrum", "diagonalize one domain and export the spectrum");
    std::string sp_domain, sp_u = "inf";
    bool sp_vectors = false;
    sp->add_option("--domain", sp_domain, "domain file")->required();
    sp->add_option("--U", sp_u, "repulsion (number or 'inf')");
    sp->add_flag("--eigenvectors", sp_vectors, "also export eigenvectors");

    // bulk
    auto* bu = app.add_subcommand("bulk", "infinite-lattice reference tables");
    int bu_d = 2;
    std::string bu_n, bu_beta, bu_mu;
    bu->add_option("--d", bu_d, "dimension");
    bu->add_option("--n", bu_n, "comma-separated fillings");
    bu->add_option("--beta", bu_beta, "comma-separated inverse temperatures");
    bu->add_option("--mu", bu_mu, "comma-separated chemical potentials");

    // enumerate
    auto* en = app.add_subcommand("enumerate", "list all hole sets of a given size");
    std::string en_torus;
    int en_holes = 0;
    std::uint64_t en_cap = fk::kDefaultEnumerationCap;
    en->add_option("--torus", en_torus, "torus, e.g. 4x4")->required();
    en->add_option("--holes", en_holes, "hole count")->required();
    en->add_option("--cap", en_cap, "refuse if the subset count exceeds this");

    // bounds
    auto* bo = app.add_subcommand("bounds", "evaluate inequality checks");
    std::string bo_check = "all", bo_domain, bo_u = "inf", bo_k;
    int bo_n = -1, bo_d = 2;
    double bo_beta = 1.0, bo_mu = 2.0, bo_eps_f = std::nan(""), bo_eps = 1.0;
    bo->add_option("--check", bo_check, "check name, comma list, or 'all'");
    bo->add_option("--domain", bo_domain, "domain file");
    bo->add_option("--N", bo_n, "electron count");
    bo->add_option("--U", bo_u, "repulsion (number or 'inf')");
    bo->add_option("--beta", bo_beta, "inverse temperature");
    bo->add_option("--mu", bo_mu, "chemical potential");
    bo->add_option("--d", bo_d, "dimension for domain-free checks");
    bo->add_option("--eps-f", bo_eps_f, "Fermi level for integral/positivity checks");
    bo->add_option("--k", bo_k, "momentum for gradient checks, comma-separated");
    bo->add_option("--eps", bo_eps, "spectral shift for gradient checks");

    // anneal
    auto* an = app.add_subcommand("anneal", "Metropolis annealing over hole sets");
    std::string an_torus, an_u = "inf", an_schedule = "1,2,4,8,16";
    int an_holes = 0, an_electrons = -1, an_steps = 100, an_chains = 1;
    double an_mu = std::nan(""), an_beta_e = 1.0, an_burn = 0.5;
    an->add_option("--torus", an_torus, "torus, e.g. 12x12")->required();
    an->add_option("--holes", an_holes, "hole count (fixed during the run)")->required();
    an->add_option("--electrons", an_electrons, "electron count (ground mode)");
    an->add_option("--mu", an_mu, "chemical potential (thermal mode)");
    an->add_option("--beta-e", an_beta_e, "electronic inverse temperature (thermal mode)");
    an->add_option("--U", an_u, "repulsion (number or 'inf')");
    an->add_option("--schedule", an_schedule, "sampling betas, comma-separated");
    an->add_option("--steps", an_steps, "steps per schedule entry");
    an->add_option("--chains", an_chains, "independent chains");
    an->add_option("--burn-in", an_burn, "burn-in fraction for observables");

    // report
    auto* re = app.add_subcommand("report", "aggregate run artifacts into one table");
    std::string re_dir = "out";
    re->add_option("dir", re_dir, "directory of runs");

    take_last_everywhere(&app);

    // Config file: inject values as defaults ahead of the explicit flags.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        std::string config_path;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty() && !args.empty()) {
            json config = json::parse(fk::read_file(config_path));
            if (!config.is_object()) throw std::invalid_argument("config: expected a JSON object");
            std::vector<std::string> injected;
            for (const auto& [key, value] : config.items()) {
                std::string flag = "--" + key;
                if (value.is_boolean()) {
                    if (value.get<bool>()) injected.push_back(flag);
                } else if (value.is_string()) {
                    injected.push_back(flag + "=" + value.get<std::string>());
                } else {
                    injected.push_back(flag + "=" + value.dump());
                }
            }
            // insert right after the subcommand token so user flags win
            args.insert(args.begin() + 1, injected.begin(), injected.end());
        }

        std::vector<const char*> cargs{argv[0]};
        for (const std::string& a : args) cargs.push_back(a.c_str());
        app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (*sp) return run_spectrum(g, sp_domain, sp_u, sp_vectors);
        if (*bu) return run_bulk(g, bu_d, bu_n, bu_beta, bu_mu);
        if (*en) return run_enumerate(g, en_torus, en_holes, en_cap);
        if (*bo)
            return run_bounds(g, bo_check, bo_domain, bo_n, bo_u, bo_beta, bo_mu, bo_d, bo_eps_f,
                              bo_k, bo_eps);
        if (*an)
            return run_anneal(g, an_torus, an_holes, an_electrons, an_mu, an_beta_e, an_u,
                              an_schedule, an_steps, an_chains, an_burn);
        if (*re) return run_report(g, re_dir);
        std::cerr << app.help();
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
