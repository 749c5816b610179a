#include "phaseless/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace phaseless::io {
namespace {

using nlohmann::json;

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::runtime_error("io: cannot parse number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

json complex_array(const CVec& v) {
  json re = json::array(), im = json::array();
  for (const auto& c : v) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return json{{"re", re}, {"im", im}};
}

CVec complex_from(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != im.size()) throw std::runtime_error("io: re/im length mismatch");
  CVec v(re.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = {re[i].get<double>(), im[i].get<double>()};
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string signal_to_csv(const Signal& x) {
  std::string out = "index,re,im\n";
  for (std::size_t i = 0; i < x.size(); ++i)
    out += std::to_string(i) + "," + format_double(x[i].real()) + "," + format_double(x[i].imag()) + "\n";
  return out;
}

Signal signal_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::size_t, cd>> rows;
  bool header = true;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.rfind("index", 0) == 0) continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 3) throw std::runtime_error("signal csv: expected 3 columns, got '" + line + "'");
    rows.emplace_back(static_cast<std::size_t>(std::stoul(f[0])), cd{parse_double(f[1]), parse_double(f[2])});
  }
  CVec v(rows.size());
  for (const auto& [i, c] : rows) {
    if (i >= v.size()) throw std::runtime_error("signal csv: index out of range");
    v[i] = c;
  }
  return Signal(std::move(v));
}

std::string signal_to_json(const Signal& x) {
  json j = complex_array(x.vec());
  j["n"] = x.size();
  if (x.is_2d()) j["shape"] = {x.shape()->rows, x.shape()->cols};
  return j.dump(2) + "\n";
}

Signal signal_from_json(const std::string& text) {
  const json j = json::parse(text);
  CVec v = complex_from(j);
  if (j.contains("n") && j.at("n").get<std::size_t>() != v.size())
    throw std::runtime_error("signal json: n does not match data length");
  if (j.contains("shape")) {
    const auto s = j.at("shape");
    return Signal(std::move(v), Shape2D{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
  }
  return Signal(std::move(v));
}

std::string measurement_descriptor_json(const MeasurementSet& y) {
  const auto& m = y.model;
  json j;
  j["kind"] = to_string(m.kind);
  j["n"] = m.n;
  j["rows"] = y.rows;
  j["cols"] = y.cols;
  if (m.kind == ModelKind::TwoD) {
    j["signal_shape"] = {m.signal_shape.rows, m.signal_shape.cols};
    j["ntilde"] = {m.ntilde1, m.ntilde2};
    j["k"] = {m.k1, m.k2};
  } else {
    j["ntilde"] = m.ntilde;
    j["k"] = m.k;
    j["hop"] = m.hop;
  }
  if (m.masks) {
    json arr = json::array();
    for (const auto& d : m.masks->masks) arr.push_back(complex_array(d));
    j["masks"] = arr;
  }
  if (m.window) {
    json w = complex_array(m.window->d);
    w["width"] = m.window->width;
    w["hop"] = m.window->hop;
    w["periodic"] = m.window->periodic;
    j["window"] = w;
  }
  if (y.noise) j["noise"] = {{"sigma", y.noise->sigma}, {"seed", y.noise->seed}};
  return j.dump(2) + "\n";
}

std::string measurement_matrix_csv(const MeasurementSet& y) {
  std::string out;
  for (std::size_t r = 0; r < y.rows; ++r) {
    for (std::size_t c = 0; c < y.cols; ++c) {
      if (c) out += ",";
      out += format_double(y.at(r, c));
    }
    out += "\n";
  }
  return out;
}

MeasurementSet measurement_from_text(const std::string& descriptor_json, const std::string& matrix_csv) {
  const json j = json::parse(descriptor_json);
  MeasurementSet y;
  auto& m = y.model;
  m.kind = model_kind_from_string(j.at("kind").get<std::string>());
  m.n = j.at("n").get<std::size_t>();
  y.rows = j.at("rows").get<std::size_t>();
  y.cols = j.at("cols").get<std::size_t>();
  if (m.kind == ModelKind::TwoD) {
    m.signal_shape = {j.at("signal_shape").at(0).get<std::size_t>(), j.at("signal_shape").at(1).get<std::size_t>()};
    m.ntilde1 = j.at("ntilde").at(0).get<std::size_t>();
    m.ntilde2 = j.at("ntilde").at(1).get<std::size_t>();
    m.k1 = j.at("k").at(0).get<std::size_t>();
    m.k2 = j.at("k").at(1).get<std::size_t>();
  } else {
    m.ntilde = j.at("ntilde").get<std::size_t>();
    m.k = j.at("k").get<std::size_t>();
    m.hop = j.value("hop", std::size_t{1});
  }
  if (j.contains("masks")) {
    MaskSet ms;
    for (const auto& d : j.at("masks")) ms.masks.push_back(complex_from(d));
    m.masks = std::move(ms);
  }
  if (j.contains("window")) {
    const auto& jw = j.at("window");
    WindowSpec w;
    w.d = complex_from(jw);
    w.width = jw.at("width").get<std::size_t>();
    w.hop = jw.at("hop").get<std::size_t>();
    w.periodic = jw.at("periodic").get<bool>();
    w.validate();
    m.window = std::move(w);
  }
  if (j.contains("noise"))
    y.noise = NoiseRecord{j.at("noise").at("sigma").get<double>(), j.at("noise").at("seed").get<std::uint64_t>()};

  std::istringstream in(matrix_csv);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != y.cols) throw std::runtime_error("measurement csv: row has wrong column count");
    for (const auto& s : f) y.y.push_back(parse_double(trim(s)));
  }
  y.validate();
  return y;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

void save_measurement(const MeasurementSet& y, const std::filesystem::path& base) {
  auto stem = base;
  if (stem.extension() == ".json" || stem.extension() == ".csv") stem.replace_extension();
  write_file(std::filesystem::path(stem.string() + ".json"), measurement_descriptor_json(y));
  write_file(std::filesystem::path(stem.string() + ".csv"), measurement_matrix_csv(y));
}

MeasurementSet load_measurement(const std::filesystem::path& path) {
  auto stem = path;
  if (stem.extension() == ".json" || stem.extension() == ".csv") stem.replace_extension();
  return measurement_from_text(read_file(stem.string() + ".json"), read_file(stem.string() + ".csv"));
}

void save_signal(const Signal& x, const std::filesystem::path& path) {
  write_file(path, path.extension() == ".csv" ? signal_to_csv(x) : signal_to_json(x));
}

Signal load_signal(const std::filesystem::path& path) {
  const auto text = read_file(path);
  return path.extension() == ".csv" ? signal_from_csv(text) : signal_from_json(text);
}

}  // namespace phaseless::io
