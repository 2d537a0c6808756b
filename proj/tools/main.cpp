#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "unmix/baseline.hpp"
#include "unmix/errors.hpp"
#include "unmix/eval.hpp"
#include "unmix/io.hpp"
#include "unmix/model.hpp"
#include "unmix/potts.hpp"
#include "unmix/sampler.hpp"
#include "unmix/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

unmix::SceneSpec parse_scene_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw unmix::data_error("cannot open scene spec " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw unmix::data_error("bad scene spec JSON " + path + ": " + e.what());
  }
  unmix::SceneSpec spec;
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  spec.num_classes = j.value("classes", spec.num_classes);
  spec.num_endmembers = j.value("endmembers", spec.num_endmembers);
  spec.bands = j.value("bands", spec.bands);
  spec.beta = j.value("beta", spec.beta);
  spec.noise_variance = j.value("noise_variance", spec.noise_variance);
  spec.seed = j.value("seed", spec.seed);
  spec.endmember_file = j.value("endmember_file", spec.endmember_file);
  spec.label_sweeps = j.value("label_sweeps", spec.label_sweeps);
  if (!j.contains("class_means") || !j.contains("class_vars"))
    throw unmix::data_error("scene spec must define class_means and class_vars");
  spec.class_means.resize(spec.num_classes, spec.num_endmembers);
  spec.class_vars.resize(spec.num_classes, spec.num_endmembers);
  for (int k = 0; k < spec.num_classes; ++k)
    for (int r = 0; r < spec.num_endmembers; ++r) {
      spec.class_means(k, r) = j["class_means"].at(k).at(r).get<double>();
      spec.class_vars(k, r) = j["class_vars"].at(k).at(r).get<double>();
    }
  return spec;
}

void write_scene(const unmix::Scene& scene, const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::path dir(out_dir);
  unmix::write_cube(scene.cube, (dir / "cube.json").string());
  unmix::write_endmembers(scene.endmembers, (dir / "endmembers.csv").string());
  unmix::write_label_map(scene.truth_labels,
                         (dir / "truth_labels.pgm").string());
  unmix::write_abundance_maps(scene.truth_abundances, scene.cube.width,
                              scene.cube.height, (dir / "truth").string(),
                              scene.endmembers.names);
  std::cout << "scene written to " << out_dir << " (empirical SNR "
            << std::setprecision(3) << scene.snr_db << " dB)\n";
}

void write_histograms(const unmix::PosteriorSamples& samples,
                      const std::string& out_dir) {
  for (int k = 1; k <= samples.num_classes; ++k) {
    unmix::ClassPosterior post;
    try {
      post = unmix::class_abundance_posterior(samples, k);
    } catch (const std::runtime_error&) {
      continue;  // class never occupied
    }
    for (int r = 0; r < samples.num_endmembers; ++r) {
      std::ofstream f(fs::path(out_dir) /
                      ("mu_class" + std::to_string(k) + "_em" +
                       std::to_string(r + 1) + ".csv"));
      f << "bin_center,count\n";
      for (int b = 0; b < post.bin_centers.rows(); ++b)
        f << post.bin_centers(b, r) << "," << post.bin_counts(b, r) << "\n";
    }
  }
}

void run_unmix_outputs(const unmix::PosteriorSamples& samples,
                       const unmix::EndmemberMatrix& endmembers,
                       const std::string& out_dir) {
  fs::create_directories(out_dir);
  unmix::LabelField map_labels = unmix::estimate_map_labels(samples);
  unmix::AbundanceMatrix mmse =
      unmix::estimate_mmse_abundances(samples, map_labels);
  unmix::write_label_map(map_labels,
                         (fs::path(out_dir) / "label_map.pgm").string());
  unmix::write_abundance_maps(mmse, samples.width, samples.height, out_dir,
                              endmembers.names);
  write_histograms(samples, out_dir);
  unmix::ChainReport report = unmix::chain_report(samples);
  std::ofstream jf(fs::path(out_dir) / "chain_report.json");
  jf << unmix::chain_report_json(report) << "\n";
  std::ofstream tf(fs::path(out_dir) / "chain_report.txt");
  tf << unmix::chain_report_text(report);
}

int run(int argc, char** argv) {
  CLI::App app{"Spatially constrained Bayesian unmixing of hyperspectral "
               "images (Potts-MRF hybrid Gibbs sampler) with an FCLS "
               "baseline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic scene from a SceneSpec JSON");
  std::string synth_spec, synth_out = "scene";
  std::uint64_t synth_seed = 0;
  bool synth_reference = false;
  synth->add_option("--spec", synth_spec, "SceneSpec JSON file");
  synth->add_flag("--reference", synth_reference,
                  "use the built-in 25x25 benchmark scene spec");
  synth->add_option("--seed", synth_seed, "RNG seed (overrides spec)");
  synth->add_option("--out-dir", synth_out, "output directory");

  // unmix
  auto* um = app.add_subcommand(
      "unmix", "Run the hybrid Gibbs sampler on a cube");
  std::string um_cube, um_end, um_out = "unmix_out", um_resume;
  unmix::ChainConfig um_cfg;
  um->add_option("--cube", um_cube, "input cube header (JSON)")->required();
  um->add_option("--endmembers", um_end, "endmember CSV")->required();
  um->add_option("--iters", um_cfg.n_mc, "total MCMC iterations");
  um->add_option("--burn", um_cfg.n_burn, "burn-in iterations");
  um->add_option("--beta", um_cfg.beta, "Potts granularity coefficient");
  um->add_option("--classes", um_cfg.num_classes, "number of classes K");
  um->add_option("--seed", um_cfg.seed, "RNG seed");
  um->add_option("--threads", um_cfg.threads, "worker threads");
  um->add_option("--checkpoint-every", um_cfg.checkpoint_every,
                 "checkpoint interval in iterations (0 = off)");
  um->add_option("--resume", um_resume, "resume from a checkpoint file");
  um->add_option("--out-dir", um_out, "output directory");

  // fcls
  auto* fc = app.add_subcommand("fcls",
                                "Fully constrained least squares unmixing");
  std::string fc_cube, fc_end, fc_out = "fcls_out";
  int fc_threads = 1;
  fc->add_option("--cube", fc_cube, "input cube header (JSON)")->required();
  fc->add_option("--endmembers", fc_end, "endmember CSV")->required();
  fc->add_option("--threads", fc_threads, "worker threads");
  fc->add_option("--out-dir", fc_out, "output directory");

  // eval
  auto* ev = app.add_subcommand("eval", "Score estimates against ground truth");
  std::string ev_est, ev_true, ev_est_labels, ev_true_labels,
      ev_out = "eval_report.json";
  int ev_classes = 0;
  ev->add_option("--est-abundances", ev_est, "estimated abundance cube")
      ->required();
  ev->add_option("--true-abundances", ev_true, "ground-truth abundance cube")
      ->required();
  ev->add_option("--est-labels", ev_est_labels, "estimated label map (PGM)");
  ev->add_option("--true-labels", ev_true_labels, "true label map (PGM)");
  ev->add_option("--classes", ev_classes, "class count for label maps");
  ev->add_option("--out", ev_out, "JSON report path");

  // potts
  auto* po = app.add_subcommand("potts", "Sample a Potts-Markov label field");
  double po_beta = 1.0;
  int po_classes = 3, po_width = 64, po_height = 64, po_sweeps = 200,
      po_threads = 1;
  std::uint64_t po_seed = 0;
  std::string po_out = "potts.pgm";
  po->add_option("--beta", po_beta, "granularity coefficient");
  po->add_option("--classes", po_classes, "number of classes K");
  po->add_option("--width", po_width, "lattice width");
  po->add_option("--height", po_height, "lattice height");
  po->add_option("--sweeps", po_sweeps, "Gibbs sweeps");
  po->add_option("--seed", po_seed, "RNG seed");
  po->add_option("--threads", po_threads, "worker threads");
  po->add_option("--out", po_out, "output PGM path");

  // bench
  auto* be = app.add_subcommand(
      "bench", "Run the synthetic benchmark and print an MSE table");
  std::uint64_t be_seed = 0;
  int be_iters = 5000, be_burn = 500, be_threads = 1;
  std::string be_out;
  be->add_option("--seed", be_seed, "RNG seed");
  be->add_option("--iters", be_iters, "total MCMC iterations");
  be->add_option("--burn", be_burn, "burn-in iterations");
  be->add_option("--threads", be_threads, "worker threads");
  be->add_option("--out-dir", be_out, "optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // argument errors exit with 2
  }

  if (*synth) {
    unmix::SceneSpec spec;
    if (synth_reference)
      spec = unmix::SceneSpec::reference(synth_seed);
    else if (!synth_spec.empty())
      spec = parse_scene_spec(synth_spec);
    else
      throw CLI::ValidationError("synth", "need --spec or --reference");
    if (synth->count("--seed")) spec.seed = synth_seed;
    write_scene(unmix::generate_scene(spec), synth_out);
  }

  if (*um) {
    unmix::ImageCube cube = unmix::read_cube(um_cube);
    unmix::EndmemberMatrix endmembers = unmix::read_endmembers(um_end);
    fs::create_directories(um_out);
    if (um_cfg.checkpoint_every > 0)
      um_cfg.checkpoint_path =
          (fs::path(um_out) / "checkpoint.bin").string();
    um_cfg.resume_path = um_resume;
    unmix::PosteriorSamples samples =
        unmix::run_chain(cube, endmembers, um_cfg);
    run_unmix_outputs(samples, endmembers, um_out);
    std::cout << "unmix: " << samples.draws() << " kept draws, outputs in "
              << um_out << "\n";
  }

  if (*fc) {
    unmix::ImageCube cube = unmix::read_cube(fc_cube);
    unmix::EndmemberMatrix endmembers = unmix::read_endmembers(fc_end);
    unmix::AbundanceMatrix abund;
    abund.values = unmix::fcls_unmix_image(cube, endmembers, 1e-10,
                                           fc_threads);
    fs::create_directories(fc_out);
    unmix::write_abundance_maps(abund, cube.width, cube.height, fc_out,
                                endmembers.names);
    std::cout << "fcls: abundance maps in " << fc_out << "\n";
  }

  if (*ev) {
    unmix::AbundanceMatrix est = unmix::read_abundance_cube(ev_est);
    unmix::AbundanceMatrix truth = unmix::read_abundance_cube(ev_true);
    unmix::AbundanceMatrix est64 = est;  // float32 storage, compare as-is
    Eigen::VectorXd mse = unmix::global_mse(est64, truth);
    json report;
    report["global_mse"] =
        std::vector<double>(mse.data(), mse.data() + mse.size());
    if (!ev_est_labels.empty() && !ev_true_labels.empty()) {
      if (ev_classes < 1)
        throw CLI::ValidationError("eval", "--classes required with label maps");
      unmix::LabelField est_z =
          unmix::read_label_map(ev_est_labels, ev_classes);
      unmix::LabelField true_z =
          unmix::read_label_map(ev_true_labels, ev_classes);
      unmix::AccuracyResult acc =
          unmix::classification_accuracy(est_z, true_z);
      report["classification_accuracy"] = acc.accuracy;
      report["class_permutation"] = acc.permutation;
      report["permutation_exhaustive"] = acc.exhaustive;
    }
    std::ofstream f(ev_out);
    f << report.dump(2) << "\n";
    std::cout << report.dump(2) << "\n";
  }

  if (*po) {
    unmix::LabelField field = unmix::sample_field(
        po_classes, po_beta, po_width, po_height,
        unmix::NeighborhoodOrder::First, po_sweeps, po_seed, po_threads);
    unmix::write_label_map(field, po_out);
    std::cout << "potts: homogeneity "
              << unmix::homogeneity(field, unmix::NeighborhoodOrder::First)
              << ", map in " << po_out << "\n";
  }

  if (*be) {
    unmix::SceneSpec spec = unmix::SceneSpec::reference(be_seed);
    unmix::Scene scene = unmix::generate_scene(spec);
    std::cout << "benchmark scene 25x25, K=3, R=3, L=" << scene.cube.bands
              << ", beta=" << spec.beta << ", SNR " << std::setprecision(3)
              << scene.snr_db << " dB\n";

    unmix::AbundanceMatrix fcls;
    fcls.values =
        unmix::fcls_unmix_image(scene.cube, scene.endmembers, 1e-10,
                                be_threads);
    Eigen::VectorXd mse_fcls =
        unmix::global_mse(fcls, scene.truth_abundances);

    unmix::ChainConfig cfg;
    cfg.n_mc = be_iters;
    cfg.n_burn = be_burn;
    cfg.seed = be_seed;
    cfg.threads = be_threads;
    unmix::PosteriorSamples samples =
        unmix::run_chain(scene.cube, scene.endmembers, cfg);
    unmix::LabelField map_labels = unmix::estimate_map_labels(samples);
    unmix::AbundanceMatrix mmse =
        unmix::estimate_mmse_abundances(samples, map_labels);
    Eigen::VectorXd mse_spatial =
        unmix::global_mse(mmse, scene.truth_abundances);
    unmix::AccuracyResult acc =
        unmix::classification_accuracy(map_labels, scene.truth_labels);

    std::cout << "\nGlobal MSEs of each abundance component\n";
    std::cout << std::left << std::setw(10) << "" << std::setw(14) << "FCLS"
              << std::setw(14) << "Spatial" << "\n";
    for (int r = 0; r < 3; ++r)
      std::cout << std::left << std::setw(10)
                << ("MSE^2_" + std::to_string(r + 1)) << std::setw(14)
                << std::setprecision(4) << mse_fcls[r] << std::setw(14)
                << mse_spatial[r] << "\n";
    std::cout << "\nlabel accuracy (permutation-matched): "
              << std::setprecision(4) << acc.accuracy << "\n";
    std::cout << "MH acceptance per coordinate:";
    Eigen::VectorXd rates = samples.acceptance_rate_per_coordinate();
    for (int r = 0; r < rates.size(); ++r) std::cout << " " << rates[r];
    std::cout << "\n\nEstimated class abundance moments (matched classes, "
                 "MMSE abundances over MAP-labeled pixels):\n";
    for (int k = 1; k <= 3; ++k) {
      int matched = acc.permutation[k - 1];
      std::vector<int> members;
      for (int p = 0; p < map_labels.pixels(); ++p)
        if (map_labels.labels[p] == k) members.push_back(p);
      // Robust within-class moments (median, squared scaled MAD): the few
      // misclassified boundary pixels are gross outliers relative to the
      // within-class spread and would otherwise inflate the variances.
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
      Eigen::VectorXd var = Eigen::VectorXd::Zero(3);
      auto median = [](std::vector<double>& v) {
        if (v.empty()) return 0.0;
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        return v[v.size() / 2];
      };
      for (int r = 0; r < 3; ++r) {
        std::vector<double> vals;
        for (int p : members) vals.push_back(mmse.values(r, p));
        mean[r] = median(vals);
        for (double& x : vals) x = std::abs(x - mean[r]);
        double mad = median(vals);
        var[r] = 1.4826 * 1.4826 * mad * mad;
      }
      std::cout << "class " << matched << " mean:";
      for (int r = 0; r < 3; ++r)
        std::cout << " " << std::setprecision(3) << mean[r];
      std::cout << "  (actual:";
      for (int r = 0; r < 3; ++r)
        std::cout << " " << spec.class_means(matched - 1, r);
      std::cout << ")  var:";
      for (int r = 0; r < 3; ++r)
        std::cout << " " << std::setprecision(3) << var[r];
      std::cout << "\n";
    }
    if (!be_out.empty()) {
      write_scene(scene, (fs::path(be_out) / "scene").string());
      run_unmix_outputs(samples, scene.endmembers,
                        (fs::path(be_out) / "spatial").string());
      unmix::write_abundance_maps(fcls, scene.cube.width, scene.cube.height,
                                  (fs::path(be_out) / "fcls").string(),
                                  scene.endmembers.names);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  } catch (const unmix::data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const unmix::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
