#include <openssl/evp.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "isrs_egn/cli.hpp"
#include "json.hpp"

namespace isrs_egn::cli {

using json = nlohmann::ordered_json;

std::string tool_version() { return ISRS_EGN_VERSION; }

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string Manifest::hash() const {
  return sha256_hex("isrs-egn " + tool_version() + "\n" + command + "\n" + method + "\n" + config_json);
}

std::string Manifest::csv_header() const {
  std::ostringstream out;
  out << "# isrs-egn " << tool_version() << ' ' << command << '\n';
  out << "# manifest_sha256: " << hash() << '\n';
  out << "# timestamp: " << timestamp << '\n';
  return out.str();
}

namespace {

constexpr const char* kEmpty = "-";

std::string class_cell(const NliReport& r, NliClass c) {
  const auto v = r.class_db(c);
  return v ? fmt(*v) : kEmpty;
}

json manifest_json(const Manifest& m) {
  json j;
  j["tool"] = "isrs-egn";
  j["version"] = tool_version();
  j["command"] = m.command;
  j["method"] = m.method;
  j["timestamp"] = m.timestamp;
  j["manifest_sha256"] = m.hash();
  j["config"] = json::parse(m.config_json);
  return j;
}

}  // namespace

std::string evaluate_csv(const Manifest& manifest, const std::vector<NliReport>& reports) {
  std::ostringstream out;
  out << manifest.csv_header();
  out << "# eta_db = 10*log10(eta) with eta = sigma2_nli / P_coi^3 referred to 1 W^-2; '-' marks an absent class\n";
  out << "coi_index,f_center_hz,method,sigma2_nli,eta_db,sci_db,xci_db,mci_db,wall_time_s\n";
  for (const NliReport& r : reports) {
    out << r.coi << ',' << fmt(r.f_center_hz) << ',' << to_string(r.method) << ',' << fmt(r.sigma2_nli) << ','
        << fmt(r.eta_db) << ',' << class_cell(r, NliClass::sci) << ',' << class_cell(r, NliClass::xci) << ','
        << class_cell(r, NliClass::mci) << ',' << fmt(r.wall_time_s) << '\n';
  }
  return out.str();
}

std::string evaluate_json(const Manifest& manifest, const std::vector<NliReport>& reports) {
  json doc;
  doc["manifest"] = manifest_json(manifest);
  json list = json::array();
  for (const NliReport& r : reports) {
    json j;
    j["coi_index"] = r.coi;
    j["f_center_hz"] = r.f_center_hz;
    j["method"] = to_string(r.method);
    j["sigma2_nli"] = r.sigma2_nli;
    j["imag_residue"] = r.imag_residue;
    j["eta"] = r.eta;
    j["eta_db"] = r.eta_db;
    j["islands"] = r.islands;
    json classes = json::object();
    for (NliClass c : {NliClass::sci, NliClass::xci, NliClass::mci}) {
      const auto idx = static_cast<std::size_t>(c);
      const TermContribution& t = r.by_class[idx];
      json k;
      k["islands"] = r.islands_by_class[idx];
      const auto db = r.class_db(c);
      k["eta_db"] = db ? json(*db) : json(nullptr);
      k["d"] = t.d;
      k["e"] = t.e;
      k["f"] = t.f;
      k["g_re"] = t.g.real();
      k["g_im"] = t.g.imag();
      k["h"] = t.h;
      classes[std::string(to_string(c))] = k;
    }
    j["classes"] = classes;
    j["wall_time_s"] = r.wall_time_s;
    list.push_back(j);
  }
  doc["reports"] = list;
  return doc.dump(2) + "\n";
}

}  // namespace isrs_egn::cli
