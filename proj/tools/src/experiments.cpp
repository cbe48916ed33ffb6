#include "lrnlm_tools/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lrnlm/chebyshev.hpp"
#include "lrnlm/error.hpp"
#include "lrnlm/filters.hpp"
#include "lrnlm/image_io.hpp"
#include "lrnlm/spectral.hpp"
#include "lrnlm/truncation_error.hpp"

namespace lrnlm::tools {
namespace {

struct ItemResult {
  std::vector<std::vector<std::string>> rows;
  std::vector<ErrorRecord> errors;
};

/// Runs work(i) for i in [0, count) on a small thread pool. Results land in
/// slot i, so the output order never depends on scheduling.
std::vector<ItemResult> run_items(std::size_t count, std::size_t threads,
                                  const std::function<ItemResult(std::size_t)>& work) {
  std::vector<ItemResult> results(count);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::atomic<std::size_t> next{0};
  auto worker = [&](bool nested) {
#ifdef _OPENMP
    if (nested) omp_set_num_threads(1);
#else
    (void)nested;
#endif
    for (std::size_t i = next++; i < count; i = next++) results[i] = work(i);
  };
  if (threads <= 1) {
    worker(false);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker, true);
  }
  return results;
}

std::string join(const auto& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ';';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += format_number(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out.empty() ? "default" : out;
}

std::string scaling_name(DistanceScaling s) {
  return s == DistanceScaling::kRaw ? "raw" : "per-pixel";
}

std::string provenance(const ExperimentConfig& cfg, const std::string& command,
                       const std::string& extra) {
  std::ostringstream os;
  os << kToolVersion << " command=" << command << " seeds=" << join(cfg.seeds)
     << " snr=" << join(cfg.snr_levels) << " patch=" << cfg.patch
     << " scaling=" << scaling_name(cfg.scaling) << ' ' << extra;
  return os.str();
}

std::string num(double v) { return format_number(v); }
std::string num(std::size_t v) { return std::to_string(v); }

/// Every (image, snr, seed) triple in canonical order.
struct WorkItem {
  std::size_t image;
  double snr;
  std::uint64_t seed;
};

std::vector<WorkItem> work_items(const ExperimentConfig& cfg, const std::vector<NamedImage>& images) {
  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return images[a].name < images[b].name; });
  const std::set<double> snrs(cfg.snr_levels.begin(), cfg.snr_levels.end());
  const std::set<std::uint64_t> seeds(cfg.seeds.begin(), cfg.seeds.end());
  std::vector<WorkItem> items;
  for (auto i : order) {
    for (double s : snrs) {
      for (auto seed : seeds) items.push_back({i, s, seed});
    }
  }
  return items;
}

std::string item_label(const NamedImage& img, const WorkItem& w) {
  return img.name + " snr=" + num(w.snr) + " seed=" + std::to_string(w.seed);
}

Image make_noisy(const Image& clean, const WorkItem& w) {
  return add_gaussian_noise(clean, NoiseModel{sigma_for_snr(clean, w.snr), w.seed});
}

ExperimentResult collect(std::vector<ItemResult> items, std::vector<ErrorRecord> errors,
                         CsvTable table, const std::string& name) {
  for (auto& it : items) {
    for (auto& row : it.rows) table.rows.push_back(std::move(row));
    for (auto& e : it.errors) errors.push_back(std::move(e));
  }
  ExperimentResult result;
  result.tables.push_back(std::move(table));
  result.table_names.push_back(name);
  result.errors = std::move(errors);
  return result;
}

std::vector<double> or_default(const std::vector<double>& v, std::vector<double> fallback) {
  return v.empty() ? fallback : v;
}

std::vector<double> default_cutoffs() {
  std::vector<double> w{0.001};
  for (int i = 1; i <= 19; ++i) w.push_back(0.05 * i);
  return w;
}

std::vector<std::size_t> rank_grid(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.ranks.empty()) return default_rank_grid(n);
  std::vector<std::size_t> k;
  for (auto r : cfg.ranks) {
    if (r <= n) k.push_back(r);
  }
  if (k.empty()) throw InvalidParameter("no rank in the grid is <= n = " + std::to_string(n));
  return k;
}

/// Fail-fast guards shared by the image experiments.
void check_images(const ExperimentConfig& cfg, const std::vector<NamedImage>& images) {
  cfg.validate();
  if (images.empty()) throw InvalidParameter("image list is empty");
  for (const auto& img : images) {
    if (img.image.size() > cfg.max_n) {
      throw CapacityError("image " + img.name + " has n = " + std::to_string(img.image.size()) +
                          " pixels > max-n = " + std::to_string(cfg.max_n));
    }
  }
}

void check_positive(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!(x > 0.0)) throw InvalidParameter(std::string(what) + " must be positive");
  }
}

}  // namespace

std::vector<std::size_t> default_rank_grid(std::size_t n) {
  static const std::size_t grid[] = {1,   5,   10,  15,  20,  25,  50,   75,   100,  125,  150, 175,
                                     200, 225, 250, 275, 300, 400, 600, 1200, 2000, 3000, 3600};
  std::vector<std::size_t> k;
  for (auto r : grid) {
    if (r <= n) k.push_back(r);
  }
  if (k.empty() || k.back() != n) k.push_back(n);
  return k;
}

std::optional<double> default_kernel_width(double snr) {
  if (snr == 0.5) return 1.5;
  if (snr == 0.75) return 1.0;
  if (snr == 1.0) return 0.5;
  return std::nullopt;
}

std::optional<int> default_sb_order(double snr) {
  if (snr == 0.5) return 15;
  if (snr == 0.75 || snr == 1.0) return 4;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw InvalidParameter("seed list is empty");
  if (snr_levels.empty()) throw InvalidParameter("SNR list is empty");
  check_positive(snr_levels, "SNR levels");
  check_positive(kernel_widths, "kernel widths");
  for (double w : cutoffs) {
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidParameter("cutoffs must lie in [0, 1]");
  }
  for (auto k : ranks) {
    if (k == 0) throw InvalidParameter("ranks must be >= 1");
  }
  for (int d : orders) {
    if (d < 1) throw InvalidParameter("filter orders must be >= 1");
  }
  for (auto n : degrees) {
    if (n == 0) throw InvalidParameter("Chebyshev degrees must be >= 1");
  }
  if (patch == 0 || patch % 2 == 0) throw InvalidParameter("patch side must be odd");
  if (image_side == 0) throw InvalidParameter("image side must be positive");
  if (max_n == 0) throw InvalidParameter("max-n must be positive");
}

void ExperimentConfig::validate_image_experiment() const {
  validate();
  if (images.empty()) throw InvalidParameter("image list is empty");
  const std::size_t n = image_side * image_side;
  if (n > max_n) {
    throw CapacityError(std::to_string(image_side) + "x" + std::to_string(image_side) + " images need n = " +
                        std::to_string(n) + " > max-n = " + std::to_string(max_n));
  }
}

std::vector<NamedImage> load_images(const ExperimentConfig& cfg, std::vector<ErrorRecord>& errors) {
  std::vector<NamedImage> out;
  std::map<std::string, int> seen;
  for (const auto& path : cfg.images) {
    try {
      Image img = read_image(path);
      if (img.width() != cfg.image_side || img.height() != cfg.image_side) {
        img = resize_bicubic(img, cfg.image_side, cfg.image_side);
      }
      std::string name = path.stem().string();
      if (const int k = seen[name]++; k > 0) name += "_" + std::to_string(k + 1);
      out.push_back({std::move(name), std::move(img)});
    } catch (const Error& e) {
      errors.push_back({path.string(), e.what()});
    }
  }
  return out;
}

PipelineOptions pipeline_options(const ExperimentConfig& cfg) {
  PipelineOptions opt;
  opt.scaling = cfg.scaling;
  opt.max_n = cfg.max_n;
  return opt;
}

Sb2Config sb2_config_for(const ExperimentConfig& cfg, double snr) {
  if (cfg.sb2_config) return load_sb2_config(*cfg.sb2_config);
  return sb2_preset(snr);
}

const CsvTable& ExperimentResult::table(const std::string& name) const {
  for (std::size_t i = 0; i < table_names.size(); ++i) {
    if (table_names[i] == name) return tables[i];
  }
  throw InvalidParameter("no table named " + name);
}

void ExperimentResult::save(const std::filesystem::path& out_dir) const {
  for (std::size_t i = 0; i < tables.size(); ++i) save_csv(tables[i], out_dir / (table_names[i] + ".csv"));
  if (!errors.empty()) {
    CsvTable t{tables.empty() ? std::string(kToolVersion) : tables.front().provenance, {"item", "message"}, {}};
    for (const auto& e : errors) t.rows.push_back({e.item, e.message});
    save_csv(t, out_dir / "errors.csv");
  }
}

ExperimentResult run_kernel_sweep(const ExperimentConfig& cfg) {
  cfg.validate_image_experiment();
  std::vector<ErrorRecord> errors;
  auto images = load_images(cfg, errors);
  auto result = run_kernel_sweep(cfg, images);
  errors.insert(errors.end(), result.errors.begin(), result.errors.end());
  result.errors = std::move(errors);
  return result;
}

ExperimentResult run_kernel_sweep(const ExperimentConfig& cfg, const std::vector<NamedImage>& images) {
  check_images(cfg, images);
  const auto widths = or_default(cfg.kernel_widths, {0.3, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0});
  const auto items = work_items(cfg, images);
  auto opt = pipeline_options(cfg);

  auto results = run_items(items.size(), cfg.threads, [&](std::size_t i) {
    const auto& w = items[i];
    const auto& named = images[w.image];
    ItemResult out;
    try {
      const Image noisy = make_noisy(named.image, w);
      const auto ks = rank_grid(cfg, noisy.size());
      for (double h : widths) {
        const auto op = build_nlm_operator(noisy, NlmParams{cfg.patch, h, opt.scaling, opt.max_n});
        const double p_nlm = psnr(named.image, noisy.with_pixels(apply_operator(op, noisy.pixels())));
        const auto dec = decompose_nlm(op, opt.decompose);
        std::size_t best_k = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (auto k : ks) {
          const double p = psnr(named.image, noisy.with_pixels(apply_rank_truncated(dec, k, noisy.pixels())));
          if (p > best) best = p, best_k = k;
        }
        out.rows.push_back({named.name, num(w.snr), std::to_string(w.seed), num(h), num(p_nlm),
                            num(best_k), num(best)});
      }
    } catch (const std::exception& e) {
      out.errors.push_back({item_label(named, w), e.what()});
    }
    return out;
  });

  CsvTable table{provenance(cfg, "sweep-kernel", "h=" + join(widths) + " K=" + join(cfg.ranks)),
                 {"image", "snr", "seed", "h", "psnr_nlm", "best_k", "psnr_eig"},
                 {}};
  return collect(std::move(results), {}, std::move(table), "kernel_sweep");
}

ExperimentResult run_cutoff_sweep(const ExperimentConfig& cfg) {
  cfg.validate_image_experiment();
  std::vector<ErrorRecord> errors;
  auto images = load_images(cfg, errors);
  auto result = run_cutoff_sweep(cfg, images);
  errors.insert(errors.end(), result.errors.begin(), result.errors.end());
  result.errors = std::move(errors);
  return result;
}

ExperimentResult run_cutoff_sweep(const ExperimentConfig& cfg, const std::vector<NamedImage>& images) {
  check_images(cfg, images);
  const auto cutoffs = or_default(cfg.cutoffs, default_cutoffs());
  const std::size_t degree = cfg.degrees.empty() ? kDefaultChebDegree : cfg.degrees.front();
  const auto items = work_items(cfg, images);
  auto opt = pipeline_options(cfg);

  auto results = run_items(items.size(), cfg.threads, [&](std::size_t i) {
    const auto& w = items[i];
    const auto& named = images[w.image];
    ItemResult out;
    try {
      const auto h = cfg.kernel_widths.empty() ? default_kernel_width(w.snr) : cfg.kernel_widths.front();
      const auto d = cfg.orders.empty() ? default_sb_order(w.snr) : cfg.orders.front();
      if (!h || !d) throw InvalidParameter("no default kernel width / order for SNR " + num(w.snr));
      const Image noisy = make_noisy(named.image, w);
      const auto op = build_nlm_operator(noisy, NlmParams{cfg.patch, *h, opt.scaling, opt.max_n});
      const double p_nlm = psnr(named.image, noisy.with_pixels(apply_operator(op, noisy.pixels())));
      auto row = [&](const char* method, const std::string& cutoff, double p) {
        out.rows.push_back({named.name, num(w.snr), std::to_string(w.seed), method, cutoff, num(p),
                            num(p - p_nlm)});
      };
      const auto dec = decompose_nlm(op, opt.decompose);
      for (auto k : rank_grid(cfg, noisy.size())) {
        row("eig", num(k), psnr(named.image, noisy.with_pixels(apply_rank_truncated(dec, k, noisy.pixels()))));
      }
      for (double omega : cutoffs) {
        const FilterSpec spec{FilterKind::kSlantedButterworth, omega, *d};
        const auto expansion = cheb_coefficients(spec.as_function(), degree, spec.to_string());
        row("sb", num(omega), psnr(named.image, noisy.with_pixels(clenshaw_matvec(op, expansion, noisy.pixels()))));
      }
    } catch (const std::exception& e) {
      out.errors.push_back({item_label(named, w), e.what()});
    }
    return out;
  });

  const std::string prov = provenance(cfg, "sweep-cutoff",
                                      "omega=" + join(cutoffs) + " K=" + join(cfg.ranks) + " h=" +
                                          join(cfg.kernel_widths) + " d=" + join(cfg.orders) +
                                          " N=" + std::to_string(degree));
  CsvTable table{prov, {"image", "snr", "seed", "method", "cutoff", "psnr", "gain"}, {}};
  auto result = collect(std::move(results), {}, std::move(table), "cutoff_sweep");

  // Mean gain per (snr, method, cutoff). Keys are parsed back from the row
  // text, which is exact at 9 significant digits for the grids used here.
  struct Key {
    double snr;
    std::string method;
    double cutoff;
    auto operator<=>(const Key&) const = default;
  };
  std::map<Key, std::pair<double, std::size_t>> sums;
  for (const auto& r : result.tables.front().rows) {
    auto& [s, c] = sums[Key{std::stod(r[1]), r[3], std::stod(r[4])}];
    s += std::stod(r[6]);
    ++c;
  }
  CsvTable summary{prov, {"snr", "method", "cutoff", "mean_gain"}, {}};
  for (const auto& [k, v] : sums) {
    summary.rows.push_back({num(k.snr), k.method, num(k.cutoff), num(v.first / double(v.second))});
  }
  result.tables.push_back(std::move(summary));
  result.table_names.push_back("cutoff_summary");
  return result;
}

ExperimentResult run_cheb_error_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.operators == 0) throw InvalidParameter("number of operators must be positive");
  if (cfg.operator_size > cfg.max_n) {
    throw CapacityError("operator size " + std::to_string(cfg.operator_size) + " > max-n = " +
                        std::to_string(cfg.max_n));
  }
  std::vector<int> orders = cfg.orders.empty() ? std::vector<int>{4, 8, 16} : cfg.orders;
  std::vector<std::size_t> degrees = cfg.degrees;
  if (degrees.empty()) {
    for (std::size_t n = 20; n <= 300; n += 20) degrees.push_back(n);
  }
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  const double h = cfg.kernel_widths.empty() ? 0.7 : cfg.kernel_widths.front();
  const double omega = cfg.cutoffs.empty() ? 0.7 : cfg.cutoffs.front();
  const std::uint64_t base = cfg.seeds.front();

  std::vector<std::vector<ChebyshevExpansion>> expansions;
  std::vector<FilterSpec> filters;
  for (int d : orders) {
    filters.push_back({FilterKind::kSlantedButterworth, omega, d});
    auto& row = expansions.emplace_back();
    for (auto n : degrees) row.push_back(cheb_coefficients(filters.back().as_function(), n, filters.back().to_string()));
  }

  // Each item yields one error per (d, N), stored as a row of numbers.
  std::vector<std::vector<double>> per_op(cfg.operators);
  auto results = run_items(cfg.operators, cfg.threads, [&](std::size_t m) {
    ItemResult out;
    try {
      const auto op = random_nlm_operator(cfg.operator_size, base + m, cfg.patch, h, cfg.max_n);
      const auto dec = decompose_nlm(op, DecomposeOptions{EigenSolver::kAuto});
      for (std::size_t a = 0; a < orders.size(); ++a) {
        const TruncationProbe probe(op, dec, filters[a].as_function());
        for (const auto& e : expansions[a]) per_op[m].push_back(probe.relative_error(e));
      }
    } catch (const std::exception& e) {
      out.errors.push_back({"operator seed=" + std::to_string(base + m), e.what()});
      per_op[m].clear();
    }
    return out;
  });

  CsvTable table{provenance(cfg, "cheb-error",
                            "operators=" + std::to_string(cfg.operators) + " n=" + std::to_string(cfg.operator_size) +
                                " h=" + num(h) + " omega=" + num(omega) + " d=" + join(orders) + " N=" + join(degrees)),
                 {"d", "N", "mean_rel_error"},
                 {}};
  std::size_t used = 0;
  for (const auto& v : per_op) used += !v.empty();
  if (used > 0) {
    for (std::size_t a = 0; a < orders.size(); ++a) {
      for (std::size_t b = 0; b < degrees.size(); ++b) {
        double sum = 0.0;
        for (const auto& v : per_op) {
          if (!v.empty()) sum += v[a * degrees.size() + b];
        }
        table.rows.push_back({std::to_string(orders[a]), num(degrees[b]), num(sum / double(used))});
      }
    }
  }
  return collect(std::move(results), {}, std::move(table), "cheb_error");
}

ExperimentResult run_comparison(const ExperimentConfig& cfg) {
  cfg.validate_image_experiment();
  std::vector<ErrorRecord> errors;
  auto images = load_images(cfg, errors);
  auto result = run_comparison(cfg, images);
  errors.insert(errors.end(), result.errors.begin(), result.errors.end());
  result.errors = std::move(errors);
  return result;
}

ExperimentResult run_comparison(const ExperimentConfig& cfg, const std::vector<NamedImage>& images) {
  check_images(cfg, images);
  const auto items = work_items(cfg, images);
  auto opt = pipeline_options(cfg);
  const bool write_images = !cfg.out_dir.empty();

  auto results = run_items(items.size(), cfg.threads, [&](std::size_t i) {
    const auto& w = items[i];
    const auto& named = images[w.image];
    ItemResult out;
    try {
      const Sb2Config sb2 = sb2_config_for(cfg, w.snr);
      const Image noisy = make_noisy(named.image, w);
      const auto op = build_nlm_operator(noisy, NlmParams{sb2.p, sb2.h1, opt.scaling, opt.max_n});

      const Image nlm = noisy.with_pixels(apply_operator(op, noisy.pixels()));
      const auto dec = decompose_nlm(op, opt.decompose);
      std::size_t rank = 0;
      if (cfg.ranks.empty()) {
        for (double l : dec.eigenvalues()) rank += l >= sb2.omega1;
        rank = std::max<std::size_t>(rank, 1);
      } else {
        rank = cfg.ranks.front();
        if (rank > noisy.size()) throw InvalidParameter("rank exceeds the number of pixels");
      }
      const Image eig = noisy.with_pixels(apply_rank_truncated(dec, rank, noisy.pixels()));
      const FilterSpec spec{FilterKind::kSlantedButterworth, sb2.omega1, sb2.d1};
      const auto expansion = cheb_coefficients(spec.as_function(), sb2.N, spec.to_string());
      const Image sb = noisy.with_pixels(clenshaw_matvec(op, expansion, noisy.pixels()));
      const Image sb_two = denoise_nlm_sb2(noisy, sb2, opt);

      out.rows.push_back({named.name, num(w.snr), std::to_string(w.seed), num(psnr(named.image, noisy)),
                          num(psnr(named.image, nlm)), num(rank), num(psnr(named.image, eig)),
                          num(psnr(named.image, sb)), num(psnr(named.image, sb_two))});
      if (write_images) {
        const auto stem = cfg.out_dir / "images" /
                          (named.name + "_snr" + num(w.snr) + "_seed" + std::to_string(w.seed));
        std::filesystem::create_directories(stem.parent_path());
        const std::pair<const char*, const Image*> outputs[] = {
            {"clean", &named.image}, {"noisy", &noisy}, {"nlm", &nlm}, {"eig", &eig}, {"sb", &sb}, {"sb2", &sb_two}};
        for (const auto& [tag, img] : outputs) write_png(*img, stem.string() + "_" + tag + ".png");
      }
    } catch (const std::exception& e) {
      out.errors.push_back({item_label(named, w), e.what()});
    }
    return out;
  });

  CsvTable table{provenance(cfg, "compare", "K=" + join(cfg.ranks) +
                                                (cfg.sb2_config ? " sb2=" + cfg.sb2_config->string() : " sb2=preset")),
                 {"image", "snr", "seed", "psnr_noisy", "psnr_nlm", "rank", "psnr_eig", "psnr_sb", "psnr_sb2"},
                 {}};
  auto result = collect(std::move(results), {}, std::move(table), "comparison");

  std::map<double, std::pair<std::vector<double>, std::size_t>> sums;
  for (const auto& r : result.tables.front().rows) {
    auto& [s, c] = sums[std::stod(r[1])];
    s.resize(6, 0.0);
    for (std::size_t j = 0; j < 6; ++j) s[j] += std::stod(r[3 + j]);
    ++c;
  }
  for (const auto& [snr, v] : sums) {
    std::vector<std::string> row{"Average", num(snr), "all"};
    for (double s : v.first) row.push_back(num(s / double(v.second)));
    result.tables.front().rows.push_back(std::move(row));
  }
  return result;
}

}  // namespace lrnlm::tools
