#include "uio/serialization.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace uio {

namespace {

using nlohmann::json;

Matrix matrix_from_json(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw Error(ErrorCode::kParseError, "missing field \"" + key + "\"");
  const json& rows = doc.at(key);
  if (!rows.is_array()) throw Error(ErrorCode::kParseError, "field \"" + key + "\" is not an array of rows");
  if (rows.empty()) return Matrix(0, 0);
  const auto r = static_cast<Eigen::Index>(rows.size());
  if (!rows[0].is_array()) throw Error(ErrorCode::kParseError, "field \"" + key + "\" is not an array of rows");
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw Error(ErrorCode::kParseError, "field \"" + key + "\" has rows of unequal length");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_number()) throw Error(ErrorCode::kParseError, "field \"" + key + "\" has a non-numeric entry");
      m(i, j) = v.get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string hp_text(const HighPrecision& v) {
  return v.str(kHighPrecisionDigits, std::ios_base::scientific);
}

json hp_matrix_to_json(const Mat<HighPrecision>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(hp_text(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat<HighPrecision> hp_matrix_from_json(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw Error(ErrorCode::kParseError, "extended section is missing \"" + key + "\"");
  const json& rows = doc.at(key);
  if (!rows.is_array()) throw Error(ErrorCode::kParseError, "extended \"" + key + "\" is not an array of rows");
  if (rows.empty()) return Mat<HighPrecision>(0, 0);
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows[0].size());
  Mat<HighPrecision> m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      throw Error(ErrorCode::kParseError, "extended \"" + key + "\" has rows of unequal length");
    }
    for (Eigen::Index j = 0; j < c; ++j) {
      const json& v = row[static_cast<std::size_t>(j)];
      if (!v.is_string()) throw Error(ErrorCode::kParseError, "extended \"" + key + "\" entries must be strings");
      try {
        m(i, j) = HighPrecision(v.get<std::string>());
      } catch (const std::exception&) {
        throw Error(ErrorCode::kParseError, "extended \"" + key + "\" has an unreadable number");
      }
    }
  }
  return m;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("malformed document: ") + e.what());
  }
}

// Shapes a 0 x 0 matrix read from "[]" into rows x cols when one of them is 0.
void fix_empty(Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.size() == 0 && (rows == 0 || cols == 0)) m.resize(rows, cols);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line) + ": \"" + s + "\" is not a number");
  }
  return v;
}

void append_block(std::string& header, const char* prefix, Eigen::Index count) {
  for (Eigen::Index i = 1; i <= count; ++i) {
    header += ',';
    header += prefix;
    header += std::to_string(i);
  }
}

void append_column(std::string& line, const Matrix& m, Eigen::Index t) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    line += ',';
    line += exact_text(m(i, t));
  }
}

}  // namespace

std::string exact_text(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

StateSpaceModel parse_model(const std::string& text, const RankTolerance& tol) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "model document must be an object");
  StateSpaceModel m;
  m.A = matrix_from_json(doc, "A");
  m.B = matrix_from_json(doc, "B");
  m.C = matrix_from_json(doc, "C");
  m.D = matrix_from_json(doc, "D");
  m.E = matrix_from_json(doc, "E");
  m.F = matrix_from_json(doc, "F");
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw Error(ErrorCode::kParseError, "\"name\" must be a string");
    m.name = doc.at("name").get<std::string>();
  }
  fix_empty(m.B, m.A.rows(), 0);
  fix_empty(m.E, m.A.rows(), 0);
  fix_empty(m.D, m.C.rows(), m.B.cols());
  fix_empty(m.F, m.C.rows(), m.E.cols());
  return make_model(m.A, m.B, m.C, m.D, m.E, m.F, m.name, tol);
}

std::string format_model(const StateSpaceModel& model) {
  json doc;
  if (!model.name.empty()) doc["name"] = model.name;
  doc["A"] = matrix_to_json(model.A);
  doc["B"] = matrix_to_json(model.B);
  doc["C"] = matrix_to_json(model.C);
  doc["D"] = matrix_to_json(model.D);
  doc["E"] = matrix_to_json(model.E);
  doc["F"] = matrix_to_json(model.F);
  return doc.dump(2) + "\n";
}

UioDocument parse_uio(const std::string& text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "observer document must be an object");
  UioDocument out;
  auto& u = out.uio;
  u.A_uio = matrix_from_json(doc, "A_uio");
  u.B_u = matrix_from_json(doc, "B_u");
  u.B_y = matrix_from_json(doc, "B_y");
  u.D_u = matrix_from_json(doc, "D_u");
  u.D_y = matrix_from_json(doc, "D_y");
  const auto n = u.A_uio.rows();
  if (u.A_uio.cols() != n) throw Error(ErrorCode::kDimensionMismatch, "A_uio is not square");
  fix_empty(u.B_u, n, 0);
  fix_empty(u.D_u, n, 0);
  if (u.B_u.rows() != n || u.B_y.rows() != n || u.D_u.rows() != n || u.D_y.rows() != n ||
      u.B_u.cols() != u.D_u.cols() || u.B_y.cols() != u.D_y.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "observer matrices have inconsistent shapes");
  }
  if (doc.contains("extended")) {
    const json& ext = doc.at("extended");
    BasicUioRealization<HighPrecision> hp;
    hp.A_uio = hp_matrix_from_json(ext, "A_uio");
    hp.B_u = hp_matrix_from_json(ext, "B_u");
    hp.B_y = hp_matrix_from_json(ext, "B_y");
    hp.D_u = hp_matrix_from_json(ext, "D_u");
    hp.D_y = hp_matrix_from_json(ext, "D_y");
    if (hp.B_u.size() == 0) hp.B_u.resize(n, u.B_u.cols());
    if (hp.D_u.size() == 0) hp.D_u.resize(n, u.D_u.cols());
    auto same = [](const auto& a, const Matrix& b) { return a.rows() == b.rows() && a.cols() == b.cols(); };
    if (!same(hp.A_uio, u.A_uio) || !same(hp.B_u, u.B_u) || !same(hp.B_y, u.B_y) || !same(hp.D_u, u.D_u) ||
        !same(hp.D_y, u.D_y)) {
      throw Error(ErrorCode::kDimensionMismatch, "extended observer matrices differ in shape from the double ones");
    }
    out.extended = std::move(hp);
  }
  return out;
}

std::string format_uio(const UioRealization& uio, const SynthesisDiagnostics* diagnostics,
                       const BasicUioRealization<HighPrecision>* extended) {
  json doc;
  doc["A_uio"] = matrix_to_json(uio.A_uio);
  doc["B_u"] = matrix_to_json(uio.B_u);
  doc["B_y"] = matrix_to_json(uio.B_y);
  doc["D_u"] = matrix_to_json(uio.D_u);
  doc["D_y"] = matrix_to_json(uio.D_y);
  json diag;
  const SpectrumReport spec = diagnostics ? diagnostics->spectrum : spectrum(uio.A_uio);
  json eig = json::array();
  for (const auto& z : spec.eigenvalues) eig.push_back(json::array({z.real(), z.imag()}));
  diag["eigenvalues"] = eig;
  diag["spectral_radius"] = spec.spectral_radius;
  diag["is_schur"] = spec.is_schur;
  if (diagnostics) {
    json res = json::object();
    for (const auto& [k, v] : diagnostics->residuals) res[k] = v;
    diag["residuals"] = res;
    diag["L"] = matrix_to_json(diagnostics->L);
    diag["A_bar"] = matrix_to_json(diagnostics->A_bar);
    diag["C_bar"] = matrix_to_json(diagnostics->C_bar);
  }
  doc["diagnostics"] = diag;
  if (extended) {
    json ext;
    ext["digits"] = kHighPrecisionDigits;
    ext["A_uio"] = hp_matrix_to_json(extended->A_uio);
    ext["B_u"] = hp_matrix_to_json(extended->B_u);
    ext["B_y"] = hp_matrix_to_json(extended->B_y);
    ext["D_u"] = hp_matrix_to_json(extended->D_u);
    ext["D_y"] = hp_matrix_to_json(extended->D_y);
    doc["extended"] = ext;
  }
  return doc.dump(2) + "\n";
}

HistoricalData parse_trajectory(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  if (line_no == 0 || line.find_first_not_of(" \t\r") == std::string::npos) {
    throw Error(ErrorCode::kParseError, "trajectory file is empty");
  }
  const auto header = split(line, ',');
  if (header.empty() || header[0] != "t") throw Error(ErrorCode::kParseError, "trajectory header must start with t");

  // Column indices per signal, in header order; the numeric suffixes must run 1..q.
  std::map<std::string, std::vector<std::size_t>> columns;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    const auto us = h.rfind('_');
    if (us == std::string::npos) throw Error(ErrorCode::kParseError, "unrecognised column \"" + h + "\"");
    const std::string prefix = h.substr(0, us);
    if (prefix == "z" || prefix == "xhat" || prefix == "e") continue;
    if (prefix != "x" && prefix != "u" && prefix != "y" && prefix != "d") {
      throw Error(ErrorCode::kParseError, "unrecognised column \"" + h + "\"");
    }
    auto& list = columns[prefix];
    if (h.substr(us + 1) != std::to_string(list.size() + 1)) {
      throw Error(ErrorCode::kParseError, "column \"" + h + "\" is out of order");
    }
    list.push_back(c);
  }
  if (columns["x"].empty() || columns["y"].empty()) {
    throw Error(ErrorCode::kParseError, "trajectory needs x_* and y_* columns");
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + " has " +
                                              std::to_string(fields.size()) + " fields, expected " +
                                              std::to_string(header.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) row[c] = parse_number(fields[c], line_no);
    if (row[0] != static_cast<double>(rows.size())) {
      throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": t must count up from 0");
    }
    rows.push_back(std::move(row));
  }

  const auto T = static_cast<Eigen::Index>(rows.size());
  auto gather = [&](const std::vector<std::size_t>& cols) {
    Matrix m(static_cast<Eigen::Index>(cols.size()), T);
    for (Eigen::Index t = 0; t < T; ++t)
      for (std::size_t i = 0; i < cols.size(); ++i) m(static_cast<Eigen::Index>(i), t) = rows[t][cols[i]];
    return m;
  };
  HistoricalData data;
  data.x = gather(columns["x"]);
  data.u = gather(columns["u"]);
  data.y = gather(columns["y"]);
  if (!columns["d"].empty()) data.d = gather(columns["d"]);
  return data;
}

std::string format_trajectory(const HistoricalData& data) {
  std::string out = "t";
  append_block(out, "x_", data.x.rows());
  append_block(out, "u_", data.u.rows());
  append_block(out, "y_", data.y.rows());
  if (data.d) append_block(out, "d_", data.d->rows());
  out += '\n';
  for (Eigen::Index t = 0; t < data.length(); ++t) {
    out += std::to_string(t);
    append_column(out, data.x, t);
    append_column(out, data.u, t);
    append_column(out, data.y, t);
    if (data.d) append_column(out, *data.d, t);
    out += '\n';
  }
  return out;
}

std::string format_trace(const RunTrace& trace) {
  std::string out = "t";
  append_block(out, "x_", trace.x.rows());
  append_block(out, "u_", trace.u.rows());
  append_block(out, "y_", trace.y.rows());
  append_block(out, "d_", trace.d.rows());
  append_block(out, "z_", trace.z.rows());
  append_block(out, "xhat_", trace.x_hat.rows());
  append_block(out, "e_", trace.e.rows());
  out += '\n';
  for (Eigen::Index t = 0; t < trace.samples(); ++t) {
    out += std::to_string(t);
    for (const Matrix* m : {&trace.x, &trace.u, &trace.y, &trace.d, &trace.z, &trace.x_hat, &trace.e})
      append_column(out, *m, t);
    out += '\n';
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write to " + path.string() + " failed");
}

}  // namespace uio
