#include "lrnlm/pipelines.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <string>

#include "lrnlm/chebyshev.hpp"
#include "lrnlm/error.hpp"
#include "lrnlm/filters.hpp"

namespace lrnlm {
namespace {

NlmOperator make_operator(const Image& img, std::size_t patch, double h, const PipelineOptions& opt) {
  return build_nlm_operator(img, NlmParams{patch, h, opt.scaling, opt.max_n});
}

}  // namespace

Image denoise_nlm(const Image& img, std::size_t patch, double h, const PipelineOptions& opt) {
  const auto op = make_operator(img, patch, h, opt);
  return img.with_pixels(apply_operator(op, img.pixels()));
}

Image denoise_nlm_eig(const Image& img, std::size_t patch, double h, std::size_t rank,
                      const PipelineOptions& opt) {
  if (rank < 1 || rank > img.size()) {
    throw InvalidParameter("rank must lie in [1, " + std::to_string(img.size()) + "]");
  }
  const auto op = make_operator(img, patch, h, opt);
  const auto dec = decompose_nlm(op, opt.decompose);
  return img.with_pixels(apply_rank_truncated(dec, rank, img.pixels()));
}

Image denoise_nlm_sb(const Image& img, std::size_t patch, double h, double omega, int order,
                     std::size_t degree, const PipelineOptions& opt) {
  const FilterSpec spec{FilterKind::kSlantedButterworth, omega, order};
  const auto expansion = cheb_coefficients(spec.as_function(), degree, spec.to_string());
  const auto op = make_operator(img, patch, h, opt);
  return img.with_pixels(clenshaw_matvec(op, expansion, img.pixels()));
}

void Sb2Config::validate() const {
  if (p == 0 || p % 2 == 0) throw InvalidParameter("sb2: patch side p must be odd");
  if (!(h1 > 0.0) || !(h2 > 0.0)) throw InvalidParameter("sb2: kernel widths must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidParameter("sb2: gamma must lie in [0, 1]");
  if (N < 1) throw InvalidParameter("sb2: Chebyshev degree N must be >= 1");
  FilterSpec{FilterKind::kSlantedButterworth, omega1, d1}.validate();
  FilterSpec{FilterKind::kSlantedButterworth, omega2, d2}.validate();
}

Sb2Config sb2_preset(double snr) {
  if (snr == 0.5) return {5, 1.5, 1.0, 0.3, 0.3, 50, 50, 0.5, 150};
  if (snr == 0.75) return {5, 1.05, 0.35, 0.3, 0.3, 15, 15, 0.15, 150};
  if (snr == 1.0) return {5, 0.5, 0.3, 0.3, 0.3, 4, 4, 0.15, 150};
  throw InvalidParameter("no two-stage preset for SNR " + std::to_string(snr));
}

Sb2Config parse_sb2_config(std::istream& in, Sb2Config cfg) {
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidParameter("sb2 config line " + std::to_string(lineno) + " is not key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "p") cfg.p = std::stoul(value);
      else if (key == "h1") cfg.h1 = std::stod(value);
      else if (key == "h2") cfg.h2 = std::stod(value);
      else if (key == "omega1") cfg.omega1 = std::stod(value);
      else if (key == "omega2") cfg.omega2 = std::stod(value);
      else if (key == "d1") cfg.d1 = std::stoi(value);
      else if (key == "d2") cfg.d2 = std::stoi(value);
      else if (key == "gamma") cfg.gamma = std::stod(value);
      else if (key == "N") cfg.N = std::stoul(value);
      else throw InvalidParameter("unknown sb2 config key '" + key + "'");
    } catch (const std::logic_error&) {
      throw InvalidParameter("bad value '" + value + "' for sb2 config key " + key);
    }
  }
  cfg.validate();
  return cfg;
}

Sb2Config load_sb2_config(const std::filesystem::path& path, Sb2Config base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_sb2_config(in, base);
}

Image denoise_nlm_sb2(const Image& img, const Sb2Config& cfg, const PipelineOptions& opt) {
  cfg.validate();
  const Image stage1 = denoise_nlm_sb(img, cfg.p, cfg.h1, cfg.omega1, cfg.d1, cfg.N, opt);
  std::vector<double> mixed(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    mixed[i] = (1.0 - cfg.gamma) * stage1[i] + cfg.gamma * img[i];
  }
  return denoise_nlm_sb(img.with_pixels(std::move(mixed)), cfg.p, cfg.h2, cfg.omega2, cfg.d2,
                        cfg.N, opt);
}

}  // namespace lrnlm
