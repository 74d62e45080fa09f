#include "homegcl/train/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "homegcl/core/error.hpp"

namespace homegcl {

namespace {

constexpr char kMagic[8] = {'H', 'G', 'C', 'L', 'C', 'K', 'P', '1'};

struct Section {
  const char* kind;
  const std::map<std::string, Mat>* tensors;
};

}  // namespace

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
  nlohmann::json header;
  header["config"] = to_json(c.config);
  header["epoch"] = c.epoch;
  header["rng_state"] = c.rng_state;
  header["graph_hash"] = c.graph_hash;
  header["adam_step"] = c.adam.step;
  auto& hist = header["history"] = nlohmann::json::array();
  for (const auto& h : c.history) hist.push_back({h.ss, h.rr, h.sr, h.c, h.total});

  const Section sections[] = {{"param", &c.params.values},
                              {"buffer", &c.params.buffers},
                              {"adam_m", &c.adam.m},
                              {"adam_v", &c.adam.v}};
  auto& index = header["tensors"] = nlohmann::json::array();
  std::vector<const Mat*> order;
  for (const auto& s : sections) {
    for (const auto& [name, m] : *s.tensors) {
      index.push_back({{"kind", s.kind}, {"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
      order.push_back(&m);
    }
  }
  const std::string text = header.dump();
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const Mat* m : order) {
    out.write(reinterpret_cast<const char*>(m->data()), static_cast<std::streamsize>(sizeof(double) * m->size()));
  }
  if (!out) throw Error("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw LoadError(path.string() + ": not a checkpoint");
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1ULL << 32)) throw LoadError(path.string() + ": corrupt header");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw LoadError(path.string() + ": truncated header");

  Checkpoint c;
  try {
    const auto header = nlohmann::json::parse(text);
    c.config = train_config_from_json(header.at("config"));
    c.epoch = header.at("epoch").get<int>();
    c.rng_state = header.at("rng_state").get<std::string>();
    c.graph_hash = header.at("graph_hash").get<std::string>();
    c.adam.step = header.at("adam_step").get<long long>();
    for (const auto& h : header.at("history")) {
      c.history.push_back({h.at(0).get<double>(), h.at(1).get<double>(), h.at(2).get<double>(), h.at(3).get<double>(),
                           h.at(4).get<double>()});
    }
    for (const auto& t : header.at("tensors")) {
      const auto kind = t.at("kind").get<std::string>();
      const auto name = t.at("name").get<std::string>();
      Mat m(t.at("rows").get<Eigen::Index>(), t.at("cols").get<Eigen::Index>());
      in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
      if (!in) throw LoadError(path.string() + ": truncated tensor data");
      if (kind == "param") c.params.values[name] = std::move(m);
      else if (kind == "buffer") c.params.buffers[name] = std::move(m);
      else if (kind == "adam_m") c.adam.m[name] = std::move(m);
      else if (kind == "adam_v") c.adam.v[name] = std::move(m);
      else throw LoadError(path.string() + ": unknown tensor kind " + kind);
    }
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return c;
}

}  // namespace homegcl
