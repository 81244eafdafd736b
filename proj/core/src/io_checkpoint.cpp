#include <cstring>
#include <fstream>

#include "json.hpp"

#include "crackcell/error.hpp"
#include "crackcell/io.hpp"
#include "crackcell/log.hpp"

namespace crackcell {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'C', 'C', 'K', 'P'};
constexpr int kFormatVersion = 1;

void put_doubles(std::ofstream& out, const double* v, std::int64_t n) {
  out.write(reinterpret_cast<const char*>(v),
            static_cast<std::streamsize>(n * sizeof(double)));
}

void get_doubles(std::ifstream& in, double* v, std::int64_t n,
                 const std::string& path) {
  in.read(reinterpret_cast<char*>(v),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw Error("checkpoint '" + path + "': truncated payload");
}

}  // namespace

void write_checkpoint(const Checkpoint& cp, const std::string& path) {
  json header;
  header["version"] = kFormatVersion;
  header["step"] = cp.state.step;
  header["n_u"] = cp.state.u.size();
  header["n_s"] = cp.state.s.size();
  header["n_q"] = cp.state.H.size();
  header["n_records"] = cp.records.size();
  header["termination"] = cp.termination;
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(cp.config_hash));
  header["config_hash"] = hash;
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(kMagic, 4);
  const std::uint32_t hlen = static_cast<std::uint32_t>(htext.size());
  out.write(reinterpret_cast<const char*>(&hlen), 4);
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));

  put_doubles(out, &cp.state.applied, 1);
  put_doubles(out, cp.state.u.data(), cp.state.u.size());
  put_doubles(out, cp.state.s.data(), cp.state.s.size());
  put_doubles(out, cp.state.H.data(), cp.state.H.size());
  for (const auto& r : cp.records) {
    const double rec[6] = {static_cast<double>(r.step),
                           r.applied,
                           r.force,
                           r.strain_micro,
                           static_cast<double>(r.stag_iterations),
                           r.converged ? 1.0 : 0.0};
    put_doubles(out, rec, 6);
  }
  if (!out) throw Error("short write on '" + path + "'");
  log_info("checkpoint: wrote step ", cp.state.step, " (", cp.records.size(),
           " records) to '", path, "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw Error("checkpoint '" + path + "': bad magic (not a checkpoint)");
  std::uint32_t hlen = 0;
  in.read(reinterpret_cast<char*>(&hlen), 4);
  if (!in || hlen == 0 || hlen > (1u << 20))
    throw Error("checkpoint '" + path + "': bad header length");
  std::string htext(hlen, '\0');
  in.read(htext.data(), hlen);
  if (!in) throw Error("checkpoint '" + path + "': truncated header");

  json header;
  try {
    header = json::parse(htext);
  } catch (const json::exception& e) {
    throw Error("checkpoint '" + path + "': header: " + e.what());
  }
  if (header.value("version", -1) != kFormatVersion)
    throw Error("checkpoint '" + path + "': unsupported format version");

  Checkpoint cp;
  cp.state.step = header.at("step").get<int>();
  cp.termination = header.value("termination", "");
  const std::string hash = header.value("config_hash", "0");
  cp.config_hash = std::strtoull(hash.c_str(), nullptr, 16);
  const auto n_u = header.at("n_u").get<std::int64_t>();
  const auto n_s = header.at("n_s").get<std::int64_t>();
  const auto n_q = header.at("n_q").get<std::int64_t>();
  const auto n_records = header.at("n_records").get<std::int64_t>();
  if (n_u < 0 || n_s < 0 || n_q < 0 || n_records < 0)
    throw Error("checkpoint '" + path + "': negative sizes in header");

  get_doubles(in, &cp.state.applied, 1, path);
  cp.state.u.resize(n_u);
  cp.state.s.resize(n_s);
  cp.state.H.resize(n_q);
  get_doubles(in, cp.state.u.data(), n_u, path);
  get_doubles(in, cp.state.s.data(), n_s, path);
  get_doubles(in, cp.state.H.data(), n_q, path);
  cp.records.resize(static_cast<std::size_t>(n_records));
  for (auto& r : cp.records) {
    double rec[6];
    get_doubles(in, rec, 6, path);
    r.step = static_cast<int>(rec[0]);
    r.applied = rec[1];
    r.force = rec[2];
    r.strain_micro = rec[3];
    r.stag_iterations = static_cast<int>(rec[4]);
    r.converged = rec[5] != 0.0;
  }
  return cp;
}

}  // namespace crackcell
