#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lrnlm/error.hpp"
#include "lrnlm/image_io.hpp"
#include "lrnlm/pipelines.hpp"
#include "lrnlm/spectral.hpp"
#include "lrnlm_tools/experiments.hpp"
#include "lrnlm_tools/synthetic.hpp"

namespace {

using namespace lrnlm;
using namespace lrnlm::tools;

struct Flags {
  std::string pipeline = "sb";
  std::optional<std::size_t> patch;
  std::vector<double> h;
  std::vector<std::size_t> rank;
  std::vector<double> omega;
  std::vector<int> order;
  std::vector<std::size_t> cheb_n;
  std::vector<double> snr;
  std::vector<std::uint64_t> seed;
  std::size_t max_n = kDefaultDenseCap;
  std::string out;
  std::string scaling = "raw";
  std::vector<std::string> images;
  bool synthetic = false;
  std::size_t size = 60;
  std::size_t operators = 50;
  std::size_t operator_size = 400;
  std::string sb2_config;
  std::size_t threads = 0;
};

ExperimentConfig to_config(const Flags& f) {
  ExperimentConfig cfg;
  for (const auto& p : f.images) cfg.images.emplace_back(p);
  if (!f.snr.empty()) cfg.snr_levels = f.snr;
  if (!f.seed.empty()) cfg.seeds = f.seed;
  if (f.patch) cfg.patch = *f.patch;
  cfg.kernel_widths = f.h;
  cfg.ranks = f.rank;
  cfg.cutoffs = f.omega;
  cfg.orders = f.order;
  cfg.degrees = f.cheb_n;
  cfg.image_side = f.size;
  cfg.operators = f.operators;
  cfg.operator_size = f.operator_size;
  if (!f.sb2_config.empty()) cfg.sb2_config = f.sb2_config;
  cfg.scaling = f.scaling == "per-pixel" ? DistanceScaling::kPerPixel : DistanceScaling::kRaw;
  cfg.max_n = f.max_n;
  cfg.threads = f.threads;
  cfg.out_dir = f.out.empty() ? "results" : f.out;
  return cfg;
}

void report(const ExperimentResult& result, const ExperimentConfig& cfg) {
  result.save(cfg.out_dir);
  for (const auto& name : result.table_names) std::cout << "wrote " << (cfg.out_dir / (name + ".csv")).string() << '\n';
  for (const auto& e : result.errors) std::cerr << "error: " << e.item << ": " << e.message << '\n';
}

template <class Run>
void run_image_experiment(const Flags& f, Run run) {
  auto cfg = to_config(f);
  if (f.synthetic) {
    cfg.validate();
    report(run(cfg, synthetic_test_set(cfg.image_side, cfg.seeds.front())), cfg);
  } else {
    report(run(cfg), cfg);
  }
}

int denoise(const Flags& f) {
  if (f.images.size() != 1) throw InvalidParameter("denoise takes exactly one input image");
  const std::filesystem::path in = f.images.front();
  const std::filesystem::path out_dir = f.out.empty() ? "." : f.out;
  PipelineOptions opt;
  opt.scaling = f.scaling == "per-pixel" ? DistanceScaling::kPerPixel : DistanceScaling::kRaw;
  opt.max_n = f.max_n;

  const Image clean = read_image(in);
  if (clean.size() > f.max_n) {
    throw CapacityError(in.string() + " has n = " + std::to_string(clean.size()) + " pixels > max-n = " +
                        std::to_string(f.max_n));
  }
  std::optional<double> snr;
  if (!f.snr.empty()) snr = f.snr.front();
  const std::uint64_t seed = f.seed.empty() ? 1 : f.seed.front();
  Image noisy = clean;
  const std::string stem = in.stem().string();
  std::filesystem::create_directories(out_dir);
  if (snr) {
    noisy = add_gaussian_noise(clean, NoiseModel{sigma_for_snr(clean, *snr), seed});
    write_png(noisy, out_dir / (stem + "_noisy.png"));
  }

  const std::size_t patch = f.patch.value_or(5);
  const double h = !f.h.empty() ? f.h.front() : (snr ? default_kernel_width(*snr) : std::nullopt).value_or(1.0);
  const double omega = f.omega.empty() ? 0.3 : f.omega.front();
  const int order = !f.order.empty() ? f.order.front() : (snr ? default_sb_order(*snr) : std::nullopt).value_or(4);
  const std::size_t degree = f.cheb_n.empty() ? kDefaultChebDegree : f.cheb_n.front();

  Image result = noisy;
  if (f.pipeline == "nlm") {
    result = denoise_nlm(noisy, patch, h, opt);
  } else if (f.pipeline == "eig") {
    const auto op = build_nlm_operator(noisy, NlmParams{patch, h, opt.scaling, opt.max_n});
    const auto dec = decompose_nlm(op, opt.decompose);
    std::size_t k = 0;
    if (f.rank.empty()) {
      for (double l : dec.eigenvalues()) k += l >= omega;
      k = std::max<std::size_t>(k, 1);
    } else {
      k = f.rank.front();
    }
    std::cout << "rank " << k << '\n';
    result = noisy.with_pixels(apply_rank_truncated(dec, k, noisy.pixels()));
  } else if (f.pipeline == "sb") {
    result = denoise_nlm_sb(noisy, patch, h, omega, order, degree, opt);
  } else {
    Sb2Config cfg = !f.sb2_config.empty() ? load_sb2_config(f.sb2_config)
                    : snr                 ? sb2_preset(*snr)
                                          : Sb2Config{};
    result = denoise_nlm_sb2(noisy, cfg, opt);
  }
  const auto out_path = out_dir / (stem + "_" + f.pipeline + ".png");
  write_png(result, out_path);
  std::cout << "wrote " << out_path.string() << '\n';
  if (snr) {
    std::printf("psnr noisy %.4f dB, %s %.4f dB\n", psnr(clean, noisy), f.pipeline.c_str(), psnr(clean, result));
  }
  return 0;
}

int gen_images(const Flags& f) {
  const std::filesystem::path out_dir = f.out.empty() ? "images" : f.out;
  std::filesystem::create_directories(out_dir);
  for (const auto& img : synthetic_test_set(f.size, f.seed.empty() ? 1 : f.seed.front())) {
    const auto path = out_dir / (img.name + ".png");
    write_png(img.image, path);
    std::cout << "wrote " << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank spectral filtering of Non-Local Means operators"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; command-line flags override it");

  Flags f;
  app.add_option("--pipeline", f.pipeline, "denoising scheme for 'denoise'")
      ->check(CLI::IsMember({"nlm", "eig", "sb", "sb2"}));
  app.add_option("--patch", f.patch, "patch side p (odd)");
  app.add_option("--h", f.h, "kernel width(s)")->delimiter(',');
  app.add_option("--rank", f.rank, "rank(s) k")->delimiter(',');
  app.add_option("--omega", f.omega, "filter cutoff(s)")->delimiter(',');
  app.add_option("--order", f.order, "filter order(s) d")->delimiter(',');
  app.add_option("--cheb-n", f.cheb_n, "Chebyshev degree(s) N")->delimiter(',');
  app.add_option("--snr", f.snr, "noise level(s), std(image) / sigma")->delimiter(',');
  app.add_option("--seed", f.seed, "noise seed(s)")->delimiter(',');
  app.add_option("--max-n", f.max_n, "largest operator dimension allowed");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--scaling", f.scaling, "patch distance scaling")->check(CLI::IsMember({"raw", "per-pixel"}));
  app.add_option("--image", f.images, "input image(s)")->delimiter(',');
  app.add_flag("--synthetic", f.synthetic, "use the built-in synthetic test set instead of --image");
  app.add_option("--size", f.size, "images are resized to size x size");
  app.add_option("--operators", f.operators, "cheb-error: number of random operators");
  app.add_option("--operator-size", f.operator_size, "cheb-error: pixels per random operator");
  app.add_option("--sb2-config", f.sb2_config, "two-stage settings file (p, h1, h2, omega1, omega2, d1, d2, gamma, N)");
  app.add_option("--threads", f.threads, "worker threads (0 = all cores)");

  auto* cmd_denoise = app.add_subcommand("denoise", "denoise one image with one pipeline");
  auto* cmd_kernel = app.add_subcommand("sweep-kernel", "NLM vs best rank-k truncation over kernel widths");
  auto* cmd_cutoff = app.add_subcommand("sweep-cutoff", "PSNR gain of NLM-Eig and NLM-SB vs cutoff");
  auto* cmd_cheb = app.add_subcommand("cheb-error", "Chebyshev truncation error over random operators");
  auto* cmd_compare = app.add_subcommand("compare", "NLM, NLM-Eig, NLM-SB and NLM-SB2 side by side");
  auto* cmd_gen = app.add_subcommand("gen-images", "write the synthetic test images");
  for (auto* c : {cmd_denoise, cmd_kernel, cmd_cutoff, cmd_cheb, cmd_compare, cmd_gen}) c->fallthrough();
  for (auto* c : {cmd_denoise, cmd_kernel, cmd_cutoff, cmd_compare}) c->add_option("images", f.images, "input images");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_denoise->parsed()) return denoise(f);
    if (cmd_gen->parsed()) return gen_images(f);
    if (cmd_cheb->parsed()) {
      const auto cfg = to_config(f);
      report(run_cheb_error_experiment(cfg), cfg);
    } else if (cmd_kernel->parsed()) {
      run_image_experiment(f, [](const auto&... a) { return run_kernel_sweep(a...); });
    } else if (cmd_cutoff->parsed()) {
      run_image_experiment(f, [](const auto&... a) { return run_cutoff_sweep(a...); });
    } else if (cmd_compare->parsed()) {
      run_image_experiment(f, [](const auto&... a) { return run_comparison(a...); });
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
