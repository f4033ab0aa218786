#include "dcrl/nn/checkpoint.hpp"

#include <fstream>
#include <sstream>

namespace dcrl::nn {

const Checkpoint::Array& Checkpoint::find(const std::string& name) const {
  for (const auto& a : arrays_)
    if (a.name == name) return a;
  throw std::runtime_error("checkpoint: missing array " + name);
}

bool Checkpoint::contains(const std::string& name) const {
  for (const auto& a : arrays_)
    if (a.name == name) return true;
  return false;
}

std::string Checkpoint::serialize() const {
  std::ostringstream out;
  nlohmann::json header = {{"format", "dcrl-checkpoint"}, {"version", kVersion}, {"meta", meta_}};
  out << header.dump() << '\n';
  for (const auto& a : arrays_) {
    nlohmann::json line = {{"name", a.name}, {"rows", a.rows}, {"cols", a.cols}, {"data", a.data}};
    out << line.dump() << '\n';
  }
  return out.str();
}

Checkpoint Checkpoint::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  Checkpoint ckpt;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: empty file");
  const auto header = nlohmann::json::parse(line);
  if (header.value("format", "") != "dcrl-checkpoint") throw std::runtime_error("checkpoint: not a dcrl checkpoint");
  if (header.value("version", 0) != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(header.value("version", 0)));
  ckpt.meta_ = header.value("meta", nlohmann::json::object());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    Array a;
    a.name = j.at("name").get<std::string>();
    a.rows = j.at("rows").get<Index>();
    a.cols = j.at("cols").get<Index>();
    a.data = j.at("data").get<std::vector<double>>();
    if (static_cast<Index>(a.data.size()) != a.rows * a.cols)
      throw std::runtime_error("checkpoint: array " + a.name + " has wrong element count");
    ckpt.arrays_.push_back(std::move(a));
  }
  return ckpt;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot write " + path.string());
  out << serialize();
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace dcrl::nn
