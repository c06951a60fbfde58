#include "teachbot/numcore/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "teachbot/error.hpp"

namespace teachbot::num {

namespace {

constexpr const char* kMagic = "TEACHBOT-CHECKPOINT 1";

void put_f64(std::ostream& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes.data(), bytes.size());
}

double get_f64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError("checkpoint: truncated payload");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(std::string("checkpoint: missing ") + what);
  return line;
}

}  // namespace

void write_checkpoint(std::ostream& out, const ParameterSet& params) {
  out << kMagic << '\n' << params.size() << '\n';
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = params[i];
    if (p.name.find_first_of(" \t\n") != std::string::npos)
      throw ArgumentError("checkpoint: parameter name contains whitespace: " + p.name);
    out << p.name << " f64 " << p.value.rank();
    for (auto d : p.value.shape()) out << ' ' << d;
    out << '\n';
  }
  for (std::size_t i = 0; i < params.size(); ++i)
    for (double v : params[i].value.values()) put_f64(out, v);
}

void save_checkpoint(const std::filesystem::path& path, const ParameterSet& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  write_checkpoint(out, params);
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

std::vector<NamedTensor> read_checkpoint(std::istream& in) {
  if (next_line(in, "header") != kMagic) throw FormatError("checkpoint: bad magic line");
  std::size_t count = 0;
  {
    std::istringstream ls(next_line(in, "parameter count"));
    if (!(ls >> count)) throw FormatError("checkpoint: bad parameter count");
  }
  std::vector<std::pair<std::string, Shape>> manifest;
  for (std::size_t i = 0; i < count; ++i) {
    std::istringstream ls(next_line(in, "manifest entry"));
    std::string name, dtype;
    std::size_t rank = 0;
    if (!(ls >> name >> dtype >> rank) || dtype != "f64")
      throw FormatError("checkpoint: bad manifest entry " + std::to_string(i));
    Shape shape(rank);
    for (auto& d : shape)
      if (!(ls >> d)) throw FormatError("checkpoint: bad shape for " + name);
    manifest.emplace_back(std::move(name), std::move(shape));
  }
  std::vector<NamedTensor> out;
  for (auto& [name, shape] : manifest) {
    Tensor t(shape);
    for (double& v : t.values()) v = get_f64(in);
    out.push_back({name, std::move(t)});
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("checkpoint: trailing bytes after payload");
  return out;
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

void assign_checkpoint(const std::vector<NamedTensor>& tensors, ParameterSet& params) {
  if (tensors.size() != params.size()) {
    throw FormatError("checkpoint has " + std::to_string(tensors.size()) + " parameters, model expects " +
                      std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    Parameter& p = params[i];
    if (tensors[i].name != p.name || tensors[i].value.shape() != p.value.shape()) {
      throw FormatError("checkpoint entry " + tensors[i].name + shape_string(tensors[i].value.shape()) +
                        " does not match model parameter " + p.name + shape_string(p.value.shape()));
    }
  }
  for (std::size_t i = 0; i < tensors.size(); ++i) params[i].value = tensors[i].value;
}

void load_checkpoint(const std::filesystem::path& path, ParameterSet& params) {
  assign_checkpoint(read_checkpoint(path), params);
}

}  // namespace teachbot::num
