#include "qkdguess/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "qkdguess/error.hpp"

namespace qkdguess {

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidArgument, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("field '") + key + "': " + e.what());
  }
}

std::optional<double> optional_field(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return field<double>(j, key);
}

json optional_value(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

ProtocolConfig protocol_from_json(const json& j) {
  ProtocolConfig c;
  const int t = field<int>(j, "t");
  const json dirs = field<json>(j, "directions");
  if (!dirs.is_array()) throw Error(ErrorKind::InvalidArgument, "'directions' must be an array");
  for (const auto& d : dirs) c.directions.push_back({field<double>(d, "theta"), field<double>(d, "phi")});
  c.basis_probs = field<std::vector<double>>(j, "basis_probs");
  c.protocol_class = protocol_class_from_string(field<std::string>(j, "class"));
  if (c.t() != t) throw Error(ErrorKind::InvalidArgument, "'t' does not match the number of directions");
  c.validate();
  return c;
}

json to_json(const ProtocolConfig& config) {
  json dirs = json::array();
  for (const auto& d : config.directions) dirs.push_back({{"theta", d.theta}, {"phi", d.phi}});
  return {{"t", config.t()},
          {"directions", dirs},
          {"basis_probs", config.basis_probs},
          {"class", to_string(config.protocol_class)}};
}

ProtocolConfig load_protocol(const std::string& name_or_path) {
  if (name_or_path == "bb84") return standard_bb84();
  if (name_or_path == "sixstate") return standard_sixstate();
  std::ifstream in(name_or_path);
  if (!in) throw Error(ErrorKind::InvalidArgument, "unknown protocol '" + name_or_path + "' (not a builtin or readable file)");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, "malformed protocol JSON: " + std::string(e.what()));
  }
  return protocol_from_json(j);
}

json to_json(const EntropyReport& rep) {
  return {{"i_ab", rep.i_ab},
          {"i_ab_basis_deducted", rep.i_ab_basis_deducted},
          {"chi_ae", rep.chi_ae},
          {"rate", rep.rate},
          {"margin", rep.margin},
          {"optimizing_lambda3", optional_value(rep.optimizing_lambda3)}};
}

EntropyReport entropy_report_from_json(const json& j) {
  EntropyReport rep;
  rep.i_ab = field<double>(j, "i_ab");
  rep.i_ab_basis_deducted = field<double>(j, "i_ab_basis_deducted");
  rep.chi_ae = field<double>(j, "chi_ae");
  rep.rate = field<double>(j, "rate");
  rep.margin = field<double>(j, "margin");
  rep.optimizing_lambda3 = optional_field(j, "optimizing_lambda3");
  return rep;
}

json to_json(const GuessResult& res) {
  const MatrixXc& v = res.best_v.matrix();
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
      rr.push_back(v(i, k).real());
      ri.push_back(v(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return {{"p_e_star", res.p_e_star},
          {"best_lambda3", optional_value(res.best_lambda3)},
          {"spectrum", res.spectrum.values()},
          {"starts_used", res.starts_used},
          {"converged", res.converged},
          {"best_v", {{"re", re}, {"im", im}}}};
}

GuessResult guess_result_from_json(const json& j) {
  GuessResult res;
  res.p_e_star = field<double>(j, "p_e_star");
  res.best_lambda3 = optional_field(j, "best_lambda3");
  res.spectrum = BellSpectrum(field<std::array<double, 4>>(j, "spectrum"));
  res.starts_used = field<int>(j, "starts_used");
  res.converged = field<bool>(j, "converged");
  const json v = field<json>(j, "best_v");
  const auto re = field<std::vector<std::vector<double>>>(v, "re");
  const auto im = field<std::vector<std::vector<double>>>(v, "im");
  const auto n = static_cast<Eigen::Index>(re.size());
  if (im.size() != re.size()) throw Error(ErrorKind::InvalidArgument, "best_v real and imaginary parts differ in shape");
  MatrixXc m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(re[i].size()) != n || static_cast<Eigen::Index>(im[i].size()) != n)
      throw Error(ErrorKind::InvalidArgument, "best_v must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = Complex(re[i][k], im[i][k]);
  }
  res.best_v = EveBasis(m);
  return res;
}

json to_json(const CriticalReport& rep) {
  return {{"eps_cr", rep.eps_cr},
          {"eps_tilde_cr", rep.eps_tilde_cr},
          {"delta_eps", rep.delta_eps},
          {"pe_star_at_crossing", rep.pe_star_at_crossing}};
}

CriticalReport critical_report_from_json(const json& j) {
  return {field<double>(j, "eps_cr"), field<double>(j, "eps_tilde_cr"), field<double>(j, "delta_eps"),
          field<double>(j, "pe_star_at_crossing")};
}

std::string to_csv(const EntropyReport& rep) {
  return "i_ab,i_ab_basis_deducted,chi_ae,rate,margin,optimizing_lambda3\n" + fmt17(rep.i_ab) + "," +
         fmt17(rep.i_ab_basis_deducted) + "," + fmt17(rep.chi_ae) + "," + fmt17(rep.rate) + "," + fmt17(rep.margin) +
         "," + (rep.optimizing_lambda3 ? fmt17(*rep.optimizing_lambda3) : std::string()) + "\n";
}

std::string to_csv(const GuessResult& res) {
  std::string out = "p_e_star,best_lambda3,lambda0,lambda1,lambda2,lambda3,starts_used,converged\n";
  out += fmt17(res.p_e_star) + "," + (res.best_lambda3 ? fmt17(*res.best_lambda3) : std::string());
  for (double l : res.spectrum.values()) out += "," + fmt17(l);
  out += "," + std::to_string(res.starts_used) + "," + (res.converged ? "true" : "false") + "\n";
  return out;
}

std::string to_csv(const CriticalReport& rep) {
  return "eps_cr,eps_tilde_cr,delta_eps,pe_star_at_crossing\n" + fmt17(rep.eps_cr) + "," + fmt17(rep.eps_tilde_cr) +
         "," + fmt17(rep.delta_eps) + "," + fmt17(rep.pe_star_at_crossing) + "\n";
}

json csv_to_json(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return json::array();
  const auto header = split(line, ',');
  json rows = json::array();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    cells.resize(header.size());
    json row = json::object();
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string& c = cells[i];
      if (c.empty()) {
        row[header[i]] = nullptr;
      } else if (c == "true" || c == "false") {
        row[header[i]] = c == "true";
      } else {
        try {
          std::size_t used = 0;
          const double v = std::stod(c, &used);
          row[header[i]] = used == c.size() ? json(v) : json(c);
        } catch (const std::exception&) {
          row[header[i]] = c;
        }
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content << std::flush;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw Error(ErrorKind::InvalidArgument, "failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::InvalidArgument, "cannot move output into place: " + ec.message());
  }
}

}  // namespace qkdguess
