#include "crisp/star.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "crisp/errors.hpp"

namespace crisp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": malformed numeric field '" + s + "'");
  }
}

}  // namespace

std::vector<StarRow> read_star(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path);

  enum class State { before_data, before_loop, labels, rows, done };
  State state = State::before_data;
  std::vector<std::string> labels;
  std::vector<StarRow> rows;
  int col_x = -1, col_y = -1, col_name = -1, col_score = -1;

  std::string raw;
  while (state != State::done && std::getline(f, raw)) {
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') {
      if (state == State::rows && !rows.empty()) state = State::done;
      continue;
    }
    switch (state) {
      case State::before_data:
        if (line.rfind("data_", 0) == 0) state = State::before_loop;
        break;
      case State::before_loop:
        if (line == "loop_") state = State::labels;
        break;
      case State::labels:
        if (line[0] == '_') {
          labels.push_back(tokenize(line)[0]);
          break;
        }
        // First non-label line: resolve columns, fall through to rows.
        for (std::size_t i = 0; i < labels.size(); ++i) {
          if (labels[i] == "_rlnCoordinateX") col_x = static_cast<int>(i);
          else if (labels[i] == "_rlnCoordinateY") col_y = static_cast<int>(i);
          else if (labels[i] == "_rlnMicrographName") col_name = static_cast<int>(i);
          else if (labels[i] == "_rlnAutopickFigureOfMerit") col_score = static_cast<int>(i);
        }
        if (col_x < 0 || col_y < 0) {
          throw IoError(path + ": missing coordinate columns");
        }
        state = State::rows;
        [[fallthrough]];
      case State::rows: {
        if (line.rfind("data_", 0) == 0) {
          state = State::done;
          break;
        }
        const std::vector<std::string> tok = tokenize(line);
        if (tok.size() < labels.size()) {
          throw IoError(path + ": row has " + std::to_string(tok.size()) +
                        " fields, expected " + std::to_string(labels.size()));
        }
        StarRow row;
        row.x = parse_double(tok[col_x], path);
        row.y = parse_double(tok[col_y], path);
        if (col_name >= 0) row.micrograph = tok[col_name];
        if (col_score >= 0) row.score = parse_double(tok[col_score], path);
        if (row.x < 0.0 || row.y < 0.0) {
          throw IoError(path + ": negative coordinate");
        }
        rows.push_back(std::move(row));
        break;
      }
      case State::done: break;
    }
  }
  if (state == State::before_data) throw IoError(path + ": no data_ block");
  if (state == State::before_loop) throw IoError(path + ": no loop_ in data block");
  if (state == State::labels) {
    // Block ended while reading labels: legal only if coordinates exist.
    bool has_x = false, has_y = false;
    for (const auto& l : labels) {
      if (l == "_rlnCoordinateX") has_x = true;
      if (l == "_rlnCoordinateY") has_y = true;
    }
    if (!has_x || !has_y) throw IoError(path + ": missing coordinate columns");
  }
  return rows;
}

void write_star(const std::string& path, const std::vector<StarRow>& rows) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path);
  f << "\ndata_\n\nloop_\n"
    << "_rlnMicrographName #1\n"
    << "_rlnCoordinateX #2\n"
    << "_rlnCoordinateY #3\n"
    << "_rlnAutopickFigureOfMerit #4\n";
  for (const auto& r : rows) {
    if (r.x < 0.0 || r.y < 0.0) throw IoError("write_star: negative coordinate");
    f << (r.micrograph.empty() ? "unknown" : r.micrograph) << ' ' << fixed6(r.x) << ' '
      << fixed6(r.y) << ' ' << fixed6(r.score) << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

std::vector<StarRow> star_rows(const PickSet& picks, const std::string& micrograph) {
  std::vector<StarRow> rows;
  rows.reserve(picks.centers.size());
  for (const Center& c : picks.centers) {
    StarRow r;
    r.micrograph = micrograph;
    r.x = c.x;
    r.y = c.y;
    r.score = c.score;
    rows.push_back(std::move(r));
  }
  return rows;
}

PickSet pick_set_from_star(const std::vector<StarRow>& rows, float box_width,
                           float box_height, const std::string& micrograph) {
  PickSet out;
  out.box_width = box_width;
  out.box_height = box_height;
  for (const StarRow& r : rows) {
    if (!micrograph.empty() && r.micrograph != micrograph) continue;
    out.centers.push_back(Center{static_cast<float>(r.x), static_cast<float>(r.y),
                                 static_cast<float>(r.score)});
  }
  return out;
}

}  // namespace crisp
