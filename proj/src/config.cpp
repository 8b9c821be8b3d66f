#include "stripe/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stripe {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view v) {
  try {
    return std::stod(std::string(v));
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " +
                                std::string(key) + ": " + std::string(v));
  }
}

long to_long(std::string_view key, std::string_view v) {
  long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw std::invalid_argument("config: bad integer value for " +
                                std::string(key) + ": " + std::string(v));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (gamma <= 0.0) throw std::invalid_argument("config: gamma must be > 0");
  if (sigma <= 0.0) throw std::invalid_argument("config: sigma must be > 0");
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("config: alpha must be in [0,1]");
  if (lambda < 0.0) throw std::invalid_argument("config: lambda must be >= 0");
  if (latent < 2 || latent % 2 != 0)
    throw std::invalid_argument("config: latent must be even and >= 2");
  if (hidden < 1 || mlp_hidden < 1)
    throw std::invalid_argument("config: network widths must be >= 1");
  if (n_shape < 1 || n_time < 1)
    throw std::invalid_argument("config: proposal counts must be >= 1");
  if (n_eval < 1 || n_eval > n_shape * n_time)
    throw std::invalid_argument("config: n_eval must be in [1, n_shape*n_time]");
  if (predictor_steps < 0 || proposal_steps < 0)
    throw std::invalid_argument("config: step counts must be >= 0");
  if (lr <= 0.0) throw std::invalid_argument("config: lr must be > 0");
  if (input_len < 1 || horizon < 1)
    throw std::invalid_argument("config: input_len and horizon must be >= 1");
  if (noise_std < 0.0)
    throw std::invalid_argument("config: noise_std must be >= 0");
  if (quality_loss != "dilate" && quality_loss != "mse")
    throw std::invalid_argument("config: quality_loss must be dilate or mse");
}

void RunConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "gamma") gamma = to_double(key, value);
  else if (key == "sigma") sigma = to_double(key, value);
  else if (key == "alpha") alpha = to_double(key, value);
  else if (key == "lambda") lambda = to_double(key, value);
  else if (key == "latent") latent = int(to_long(key, value));
  else if (key == "hidden") hidden = int(to_long(key, value));
  else if (key == "mlp_hidden") mlp_hidden = int(to_long(key, value));
  else if (key == "n_shape") n_shape = int(to_long(key, value));
  else if (key == "n_time") n_time = int(to_long(key, value));
  else if (key == "n_eval") n_eval = int(to_long(key, value));
  else if (key == "predictor_steps") predictor_steps = int(to_long(key, value));
  else if (key == "proposal_steps") proposal_steps = int(to_long(key, value));
  else if (key == "lr") lr = to_double(key, value);
  else if (key == "seed") seed = std::uint64_t(to_long(key, value));
  else if (key == "input_len") input_len = int(to_long(key, value));
  else if (key == "horizon") horizon = int(to_long(key, value));
  else if (key == "noise_std") noise_std = to_double(key, value);
  else if (key == "quality_loss") quality_loss = std::string(value);
  else
    throw std::invalid_argument("config: unknown key: " + std::string(key));
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected key = value");
    cfg.set(sv.substr(0, eq), sv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

std::string RunConfig::to_string() const {
  std::ostringstream out;
  out << "gamma = " << gamma << "\n"
      << "sigma = " << sigma << "\n"
      << "alpha = " << alpha << "\n"
      << "lambda = " << lambda << "\n"
      << "latent = " << latent << "\n"
      << "hidden = " << hidden << "\n"
      << "mlp_hidden = " << mlp_hidden << "\n"
      << "n_shape = " << n_shape << "\n"
      << "n_time = " << n_time << "\n"
      << "n_eval = " << n_eval << "\n"
      << "predictor_steps = " << predictor_steps << "\n"
      << "proposal_steps = " << proposal_steps << "\n"
      << "lr = " << lr << "\n"
      << "seed = " << seed << "\n"
      << "input_len = " << input_len << "\n"
      << "horizon = " << horizon << "\n"
      << "noise_std = " << noise_std << "\n"
      << "quality_loss = " << quality_loss << "\n";
  return out.str();
}

std::uint64_t substream(std::uint64_t root, std::string_view name) {
  // FNV-1a over the stream name, mixed with the root seed.
  std::uint64_t h = 14695981039346656037ull ^ root;
  for (char c : name) {
    h ^= std::uint64_t(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdull;
  h ^= h >> 33;
  return h;
}

namespace io {

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + tmp);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace io

}  // namespace stripe
