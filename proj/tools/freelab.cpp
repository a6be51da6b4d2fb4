// freelab: command-line front end for the verification suite, the Monte
// Carlo experiments, deterministic predictions and lattice inspection.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "freelab/config.hpp"
#include "freelab/errors.hpp"
#include "freelab/experiments.hpp"
#include "freelab/ncp.hpp"
#include "freelab/verify.hpp"

namespace {

using freelab::RunConfig;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ",") + s;
  return out;
}

// Comma lists may also be given as repeated values ("--n 256 512").
void apply_list(RunConfig& cfg, const std::string& key, const std::vector<std::string>& values) {
  if (!values.empty()) cfg.set(key, join(values));
}

void apply(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (!value.empty()) cfg.set(key, value);
}

int print_ncp(const std::string& what, const std::string& arg, bool connected) {
  using namespace freelab;
  if (what == "enumerate") {
    for (const auto& pi : enumerate_ncp(GroundSet::first_n(std::stoi(arg)))) std::cout << pi.to_string() << '\n';
  } else if (what == "kreweras") {
    std::cout << kreweras(NonCrossingPartition::parse(arg)).to_string() << '\n';
  } else if (what == "mobius") {
    std::cout << mobius_to_top(NonCrossingPartition::parse(arg)) << '\n';
  } else if (what == "catalan") {
    std::cout << catalan(static_cast<unsigned>(std::stoul(arg))) << '\n';
  } else if (what == "graphs") {
    const auto ground = GroundSet::first_n(std::stoi(arg));
    for (const auto& g : connected ? enumerate_connected_ncg(ground) : enumerate_ncg(ground))
      std::cout << g.to_string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"freelab: non-crossing combinatorics, deterministic chain approximations and Wigner Monte Carlo"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir, format;
  std::string seed, workers;
  bool no_timing = false;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "configuration file (key = value with [sections])");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--workers", workers, "worker threads (default $FREELAB_WORKERS or 1)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--no-timing", no_timing, "write wall_ms = 0 so outputs are byte-reproducible");
  app.add_option("--set", overrides, "override any setting, section.key=value");

  // verify
  auto* verify = app.add_subcommand("verify", "run the deterministic identity battery");
  std::size_t k_max = 0;
  std::string perturb;
  verify->add_option("--k-max", k_max, "largest chain order checked");
  verify->add_option("--perturb-q", perturb, "relative fault injected into the graph-route pair factors");

  // locallaw
  auto* locallaw = app.add_subcommand("locallaw", "resolvent-chain deviations over an (N, eta, k) grid");
  std::vector<std::string> ll_n, ll_eta, ll_k, ll_samples;
  locallaw->add_option("--n", ll_n, "matrix sizes")->delimiter(',');
  locallaw->add_option("--eta", ll_eta, "imaginary parts")->delimiter(',');
  locallaw->add_option("--k", ll_k, "chain orders")->delimiter(',');
  locallaw->add_option("--samples", ll_samples, "samples, one count or one per size")->delimiter(',');

  // thermalise
  auto* thermalise = app.add_subcommand("thermalise", "Heisenberg-evolved correlations on a time grid");
  std::string th_n, th_min, th_max, th_step, th_samples, th_a, th_b, th_c;
  std::vector<std::string> th_pairs;
  bool th_iso = false;
  thermalise->add_option("--n", th_n, "matrix size");
  thermalise->add_option("--t-min", th_min);
  thermalise->add_option("--t-max", th_max);
  thermalise->add_option("--t-step", th_step);
  thermalise->add_option("--samples", th_samples);
  thermalise->add_option("--a", th_a, "observable A");
  thermalise->add_option("--b", th_b, "observable B");
  thermalise->add_option("--c", th_c, "observable C for three-observable pairs");
  thermalise->add_option("--pairs", th_pairs, "(t, s) pairs as t:s")->delimiter(',');
  thermalise->add_flag("--isotropic", th_iso, "also record <x, A(t) y>");

  // freeness
  auto* freeness = app.add_subcommand("freeness", "centered alternating products at growing time separation");
  std::string fr_n, fr_samples;
  std::vector<std::string> fr_sep, fr_obs, fr_deg;
  freeness->add_option("--n", fr_n, "matrix size");
  freeness->add_option("--samples", fr_samples);
  freeness->add_option("--separations", fr_sep)->delimiter(',');
  freeness->add_option("--observables", fr_obs)->delimiter(',');
  freeness->add_option("--degrees", fr_deg)->delimiter(',');

  // predict
  auto* predict = app.add_subcommand("predict", "deterministic prediction with its partition breakdown");
  predict->require_subcommand(1);
  std::vector<std::string> obs = {"identity"};
  long dim = 8;
  auto* p_chain = predict->add_subcommand("chain", "<M_[k] A_k> for a list of spectral parameters");
  std::vector<std::string> z_list;
  p_chain->add_option("--z", z_list, "spectral parameters, e.g. 0+1i,0+2i")->delimiter(',')->required();
  auto* p_exp = predict->add_subcommand("exp", "<e^{is_1 W}A_1 ... e^{is_k W}A_k>");
  std::vector<double> s_list;
  p_exp->add_option("--s", s_list, "times")->delimiter(',')->required();
  auto* p_f = predict->add_subcommand("f", "<f_1(W)A_1 ... f_k(W)A_k> for expressions in x");
  std::vector<std::string> f_list;
  std::size_t f_k = 0;
  p_f->add_option("--f", f_list, "function of x, e.g. \"exp(i*3*x)\" (repeatable)")->required();
  p_f->add_option("--k", f_k, "chain length when one function is repeated");
  for (auto* sub : {p_chain, p_exp, p_f}) {
    sub->add_option("--obs", obs, "observables: generator names or @file")->delimiter(',');
    sub->add_option("--dim", dim, "dimension for named observables")->check(CLI::PositiveNumber);
  }

  // ncp
  auto* ncp = app.add_subcommand("ncp", "inspect non-crossing partitions and graphs");
  std::string ncp_what, ncp_arg;
  bool ncp_connected = false;
  ncp->add_option("what", ncp_what, "enumerate N | kreweras P | mobius P | catalan N | graphs N")
      ->required()
      ->check(CLI::IsMember({"enumerate", "kreweras", "mobius", "catalan", "graphs"}));
  ncp->add_option("arg", ncp_arg, "size or partition such as \"1 3 4|2|5|6\"")->required();
  ncp->add_flag("--connected", ncp_connected, "graphs: connected ones only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) throw freelab::ValidationError("--set expects section.key=value, got '" + o + "'");
      cfg.set(freelab::trim(o.substr(0, eq)), o.substr(eq + 1));
    }
    apply(cfg, "run.seed", seed);
    apply(cfg, "run.workers", workers);
    apply(cfg, "run.out", out_dir);
    apply(cfg, "run.format", format);
    if (no_timing) cfg.set("run.timing", "false");

    if (*verify) {
      if (verify->count("--k-max")) cfg.set("verify.k_max", std::to_string(k_max));
      apply(cfg, "verify.perturb_q", perturb);
      freelab::VerifyOptions opt;
      opt.k_max = static_cast<std::size_t>(cfg.get_int("verify.k_max"));
      opt.perturb_q = cfg.get_double("verify.perturb_q");
      opt.seed = cfg.get_uint("run.seed");
      const auto report = freelab::run_verify_suite(opt);
      freelab::print_report(report, std::cout);
      return report.all_passed() ? 0 : 1;
    }
    if (*locallaw) {
      apply_list(cfg, "locallaw.n", ll_n);
      apply_list(cfg, "locallaw.eta", ll_eta);
      apply_list(cfg, "locallaw.k", ll_k);
      apply_list(cfg, "locallaw.samples", ll_samples);
      std::cout << freelab::write_run(cfg, "locallaw", freelab::run_locallaw(cfg)) << '\n';
      return 0;
    }
    if (*thermalise) {
      apply(cfg, "thermalise.n", th_n);
      apply(cfg, "thermalise.t_min", th_min);
      apply(cfg, "thermalise.t_max", th_max);
      apply(cfg, "thermalise.t_step", th_step);
      apply(cfg, "thermalise.samples", th_samples);
      apply(cfg, "thermalise.a", th_a);
      apply(cfg, "thermalise.b", th_b);
      apply(cfg, "thermalise.c", th_c);
      apply_list(cfg, "thermalise.pairs", th_pairs);
      if (th_iso) cfg.set("thermalise.isotropic", "true");
      std::cout << freelab::write_run(cfg, "thermalise", freelab::run_thermalise(cfg)) << '\n';
      return 0;
    }
    if (*freeness) {
      apply(cfg, "freeness.n", fr_n);
      apply(cfg, "freeness.samples", fr_samples);
      apply_list(cfg, "freeness.separations", fr_sep);
      apply_list(cfg, "freeness.observables", fr_obs);
      apply_list(cfg, "freeness.degrees", fr_deg);
      std::cout << freelab::write_run(cfg, "freeness", freelab::run_freeness(cfg)) << '\n';
      return 0;
    }
    if (*predict) {
      nlohmann::json result;
      if (*p_chain) {
        std::vector<std::complex<double>> z;
        for (const auto& item : z_list) z.push_back(freelab::parse_complex(item));
        result = freelab::predict_chain(z, obs, dim);
      } else if (*p_exp) {
        result = freelab::predict_exp(s_list, obs, dim);
      } else {
        result = freelab::predict_f(f_list, f_k, obs, dim);
      }
      std::cout.precision(17);
      std::cout << result["value"][0].get<double>() << ' ' << result["value"][1].get<double>() << '\n';
      std::cout << result.dump(2) << '\n';
      return 0;
    }
    if (*ncp) return print_ncp(ncp_what, ncp_arg, ncp_connected);
  } catch (const freelab::Error& e) {
    std::cerr << "freelab: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "freelab: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
