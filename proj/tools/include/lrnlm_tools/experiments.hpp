#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lrnlm/nlm_operator.hpp"
#include "lrnlm/pipelines.hpp"
#include "lrnlm_tools/csv.hpp"
#include "lrnlm_tools/synthetic.hpp"

namespace lrnlm::tools {

inline constexpr const char* kToolVersion = "lrnlm 0.1.0";

/// Rank grid of the kernel-width experiment; values above n are dropped.
std::vector<std::size_t> default_rank_grid(std::size_t n);

/// Kernel width, SB order per noise level used by the cutoff sweep:
/// SNR 0.5 -> (1.5, 15), 0.75 -> (1.0, 4), 1 -> (0.5, 4).
/// Empty for other levels.
std::optional<double> default_kernel_width(double snr);
std::optional<int> default_sb_order(double snr);

/// Settings shared by the experiment runners. Empty grids and unset
/// optionals mean "use the experiment's default".
struct ExperimentConfig {
  std::vector<std::filesystem::path> images;
  std::vector<double> snr_levels{0.5};
  std::vector<std::uint64_t> seeds{1};

  std::size_t patch = 5;
  std::vector<double> kernel_widths;
  std::vector<std::size_t> ranks;
  std::vector<double> cutoffs;
  std::vector<int> orders;
  std::vector<std::size_t> degrees;  ///< Chebyshev N

  std::size_t image_side = 60;     ///< inputs are resized to side x side
  std::size_t operators = 50;      ///< cheb-error: number of random operators
  std::size_t operator_size = 400; ///< cheb-error: pixels per operator

  std::optional<std::filesystem::path> sb2_config;  ///< replaces the presets
  DistanceScaling scaling = DistanceScaling::kRaw;
  std::size_t max_n = kDefaultDenseCap;
  std::size_t threads = 0;  ///< 0 = hardware concurrency
  std::filesystem::path out_dir;

  /// Checks the fields every experiment needs (non-empty seeds and SNR
  /// levels, positive grid values). Throws InvalidParameter.
  void validate() const;
  /// validate() plus a non-empty image list and the max_n guard for
  /// side x side images. Throws InvalidParameter or CapacityError.
  void validate_image_experiment() const;
};

struct ErrorRecord {
  std::string item;
  std::string message;
};

/// Reads and resizes cfg.images; unreadable files become error records.
std::vector<NamedImage> load_images(const ExperimentConfig& cfg, std::vector<ErrorRecord>& errors);

/// Pipeline options derived from the config (scaling, max_n).
PipelineOptions pipeline_options(const ExperimentConfig& cfg);

/// Two-stage settings for a noise level: cfg.sb2_config if set, else the
/// published preset. Throws InvalidParameter when neither exists.
Sb2Config sb2_config_for(const ExperimentConfig& cfg, double snr);

struct ExperimentResult {
  std::vector<CsvTable> tables;  ///< named by table_names, same order
  std::vector<std::string> table_names;
  std::vector<ErrorRecord> errors;

  const CsvTable& table(const std::string& name) const;
  /// Writes every table to out_dir/<name>.csv, and errors.csv when there
  /// are error records.
  void save(const std::filesystem::path& out_dir) const;
};

/// PSNR of NLM and of the best rank-k truncation over the rank grid, for
/// every image, SNR, seed and kernel width.
/// CSV kernel_sweep: image,snr,seed,h,psnr_nlm,best_k,psnr_eig.
ExperimentResult run_kernel_sweep(const ExperimentConfig& cfg);
ExperimentResult run_kernel_sweep(const ExperimentConfig& cfg, const std::vector<NamedImage>& images);

/// PSNR gain over NLM of NLM-Eig (cutoff = rank) and NLM-SB (cutoff = omega).
/// CSV cutoff_sweep: image,snr,seed,method,cutoff,psnr,gain and
/// cutoff_summary: snr,method,cutoff,mean_gain.
ExperimentResult run_cutoff_sweep(const ExperimentConfig& cfg);
ExperimentResult run_cutoff_sweep(const ExperimentConfig& cfg, const std::vector<NamedImage>& images);

/// Mean relative truncation error of SB filters over seeded random NLM
/// operators (p = patch, h = first kernel width or 0.7, omega = first
/// cutoff or 0.7). Operator m uses seed seeds[0] + m.
/// CSV cheb_error: d,N,mean_rel_error.
ExperimentResult run_cheb_error_experiment(const ExperimentConfig& cfg);

/// NLM, NLM-Eig, NLM-SB and NLM-SB2 per image, SNR and seed with the
/// two-stage settings of each noise level: NLM and NLM-SB use the first
/// stage (h1, omega1, d1, N); NLM-Eig keeps the eigenvalues >= omega1
/// unless a rank is given. Writes denoised PNGs when out_dir is set.
/// CSV comparison: image,snr,seed,psnr_noisy,psnr_nlm,rank,psnr_eig,psnr_sb,psnr_sb2
/// with one "Average" row per SNR.
ExperimentResult run_comparison(const ExperimentConfig& cfg);
ExperimentResult run_comparison(const ExperimentConfig& cfg, const std::vector<NamedImage>& images);

}  // namespace lrnlm::tools
