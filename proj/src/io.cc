// Copyright 2026 The kftomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "kftomo/io.h"

#include <fstream>
#include <sstream>

namespace kftomo::io {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(what), line_(line), column_(column) {}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(offset, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports the byte just past the offending token.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, col] = line_column(text, offset);
    throw ParseError("malformed JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(col),
                     line, col);
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json_text(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), e.line(), e.column());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path);
}

void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

std::vector<std::vector<double>> rows_of(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& r = j[i];
    const std::string w = where + "[" + std::to_string(i) + "]";
    if (!r.is_array()) fail(w, "expected a row array");
    std::vector<double> row;
    for (std::size_t c = 0; c < r.size(); ++c) row.push_back(number(r[c], w + "[" + std::to_string(c) + "]"));
    if (!rows.empty() && row.size() != rows.front().size()) fail(w, "ragged matrix");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> list_of(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Json rows_json(const RMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

RMatrix rows_matrix(const std::vector<std::vector<double>>& rows) {
  const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index c = r ? static_cast<Eigen::Index>(rows.front().size()) : 0;
  RMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Json list_json(const RVector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

RVector list_vector(const std::vector<double>& v) {
  return Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Mode parse_mode(const Json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "mode must be a string");
  const auto s = j.get<std::string>();
  if (s == "pulsed") return Mode::kPulsed;
  if (s == "cw") return Mode::kCW;
  fail(where, "mode must be 'pulsed' or 'cw'");
}

}  // namespace

Json matrix_to_json(const CMatrix& m) {
  return Json{{"re", rows_json(m.real())}, {"im", rows_json(m.imag())}};
}

CMatrix matrix_from_json(const Json& j, const std::string& where) {
  const RMatrix re = rows_matrix(rows_of(field(j, "re", where), where + ".re"));
  RMatrix im = RMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = rows_matrix(rows_of(j.at("im"), where + ".im"));
    if (im.rows() != re.rows() || im.cols() != re.cols()) fail(where, "re and im differ in shape");
  }
  CMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

Json rmatrix_to_json(const RMatrix& m) { return rows_json(m); }
RMatrix rmatrix_from_json(const Json& j, const std::string& where) { return rows_matrix(rows_of(j, where)); }

Json cvector_to_json(const CVector& v) {
  return Json{{"re", list_json(v.real())}, {"im", list_json(v.imag())}};
}

CVector cvector_from_json(const Json& j, const std::string& where) {
  const RVector re = list_vector(list_of(field(j, "re", where), where + ".re"));
  RVector im = RVector::Zero(re.size());
  if (j.contains("im")) {
    im = list_vector(list_of(j.at("im"), where + ".im"));
    if (im.size() != re.size()) fail(where, "re and im differ in length");
  }
  CVector v(re.size());
  v.real() = re;
  v.imag() = im;
  return v;
}

Json rvector_to_json(const RVector& v) { return list_json(v); }
RVector rvector_from_json(const Json& j, const std::string& where) { return list_vector(list_of(j, where)); }

const char* problem_name(ProblemKind k) {
  return k == ProblemKind::kState ? "state" : "diagonal-povm";
}

Dataset parse_dataset(const Json& j) {
  const std::string root = "dataset";
  if (!j.is_object()) fail(root, "top level must be an object");
  const Json& fmt = field(j, "format", root);
  if (!fmt.is_string() || fmt.get<std::string>() != kDatasetFormat) {
    fail(root + ".format", std::string("expected '") + kDatasetFormat + "'");
  }
  Dataset d;
  const std::string problem = j.value("problem", std::string("state"));
  if (problem == "state") {
    d.problem = ProblemKind::kState;
    const Json& dim = field(j, "dimension", root);
    if (!dim.is_number_integer() || dim.get<int>() < 2) fail(root + ".dimension", "must be an integer >= 2");
    d.dimension = dim.get<int>();
  } else if (problem == "diagonal-povm") {
    d.problem = ProblemKind::kDiagonalPovm;
    const Json& fam = field(j, "family", root);
    d.family.elements = static_cast<int>(number(field(fam, "elements", root + ".family"), root + ".family.elements"));
    d.family.depth = static_cast<int>(number(field(fam, "depth", root + ".family"), root + ".family.depth"));
    if (d.family.elements < 2 || d.family.depth < 1) fail(root + ".family", "invalid family size");
  } else {
    fail(root + ".problem", "must be 'state' or 'diagonal-povm'");
  }

  const Json& settings = field(j, "settings", root);
  if (!settings.is_array() || settings.empty()) fail(root + ".settings", "must be a non-empty array");
  for (std::size_t s = 0; s < settings.size(); ++s) {
    const std::string w = root + ".settings[" + std::to_string(s) + "]";
    const Json& js = settings[s];
    DatasetSetting ds;
    ds.name = js.value("name", std::string("setting") + std::to_string(s));
    int outcomes = 0;
    if (d.problem == ProblemKind::kState) {
      const Json& povm = field(js, "povm", w);
      if (!povm.is_array()) fail(w + ".povm", "must be an array of matrices");
      for (std::size_t e = 0; e < povm.size(); ++e) {
        const std::string we = w + ".povm[" + std::to_string(e) + "]";
        CMatrix m = matrix_from_json(povm[e], we);
        if (m.rows() != d.dimension || m.cols() != d.dimension) fail(we, "element has the wrong dimension");
        if (!is_hermitian(m, 1e-12)) fail(we, "element is not Hermitian");
        ds.povm.push_back(std::move(m));
      }
      outcomes = static_cast<int>(ds.povm.size());
    } else {
      ds.probe_weights = rvector_from_json(field(js, "probe_weights", w), w + ".probe_weights");
      if (ds.probe_weights.size() != d.family.depth) fail(w + ".probe_weights", "length must equal family depth");
      outcomes = d.family.elements;
    }
    const Json& counts = field(js, "counts", w);
    if (!counts.is_array()) fail(w + ".counts", "must be an array");
    std::vector<std::int64_t> f;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (!counts[i].is_number_integer() || counts[i].get<std::int64_t>() < 0) {
        fail(w + ".counts[" + std::to_string(i) + "]", "must be a non-negative integer");
      }
      f.push_back(counts[i].get<std::int64_t>());
    }
    if (static_cast<int>(f.size()) != outcomes) fail(w + ".counts", "length must equal the number of outcomes");
    const Mode mode = js.contains("mode") ? parse_mode(js.at("mode"), w + ".mode") : Mode::kPulsed;
    if (mode == Mode::kPulsed) {
      std::int64_t total = 0;
      for (auto v : f) total += v;
      const std::int64_t runs = js.contains("runs") ? js.at("runs").get<std::int64_t>() : total;
      if (runs != total) fail(w + ".runs", "pulsed counts must sum to runs");
      ds.record = pulsed_record(std::move(f), runs);
    } else {
      ds.record = cw_record(std::move(f));
    }
    d.settings.push_back(std::move(ds));
  }
  if (j.contains("truth") && !j.at("truth").is_null()) {
    const Json& t = j.at("truth");
    if (d.problem == ProblemKind::kState) {
      const CMatrix rho = matrix_from_json(t, root + ".truth");
      if (rho.rows() != d.dimension || rho.cols() != d.dimension) fail(root + ".truth", "wrong dimension");
      d.truth = vec(rho);
    } else {
      const RVector theta = rvector_from_json(t, root + ".truth");
      if (theta.size() != d.family.size()) fail(root + ".truth", "wrong length");
      d.truth = theta.cast<Complex>();
    }
  }
  if (j.contains("metadata")) {
    const Json& md = j.at("metadata");
    if (!md.is_object()) fail(root + ".metadata", "must be an object");
    for (auto it = md.begin(); it != md.end(); ++it) {
      d.metadata[it.key()] = it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    }
  }
  return d;
}

Json dataset_to_json(const Dataset& d) {
  Json j;
  j["format"] = kDatasetFormat;
  j["problem"] = problem_name(d.problem);
  if (d.problem == ProblemKind::kState) {
    j["dimension"] = d.dimension;
  } else {
    j["family"] = Json{{"elements", d.family.elements}, {"depth", d.family.depth}};
  }
  Json settings = Json::array();
  for (const auto& s : d.settings) {
    Json js;
    js["name"] = s.name;
    if (d.problem == ProblemKind::kState) {
      Json povm = Json::array();
      for (const auto& e : s.povm) povm.push_back(matrix_to_json(e));
      js["povm"] = std::move(povm);
    } else {
      js["probe_weights"] = rvector_to_json(s.probe_weights);
    }
    js["counts"] = s.record.counts;
    js["mode"] = s.record.mode == Mode::kPulsed ? "pulsed" : "cw";
    if (s.record.mode == Mode::kPulsed) js["runs"] = s.record.runs;
    settings.push_back(std::move(js));
  }
  j["settings"] = std::move(settings);
  if (d.truth) {
    j["truth"] = d.problem == ProblemKind::kState ? matrix_to_json(mat(*d.truth))
                                                  : rvector_to_json(d.truth->real());
  }
  Json md = Json::object();
  for (const auto& [k, v] : d.metadata) md[k] = v;
  j["metadata"] = std::move(md);
  return j;
}

}  // namespace kftomo::io
