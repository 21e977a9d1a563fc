#include "gpform/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gpform {

HingeParams default_hinge_for(int num_robots) {
  HingeParams p;  // thresholds already at stock values
  if (num_robots <= 4) {
    p.sigma_obs = 0.1;
    p.sigma_col = 0.1;
    p.sigma_form = 0.3;
  } else if (num_robots <= 6) {
    p.sigma_obs = 0.4;
    p.sigma_col = 0.4;
    p.sigma_form = 0.02;
  } else {
    p.sigma_obs = 0.4;
    p.sigma_col = 0.4;
    p.sigma_form = 0.005;
  }
  return p;
}

void Scenario::validate() const {
  if (num_robots < 1) throw std::invalid_argument("scenario: robots must be >= 1");
  if (d0 <= 0) throw std::invalid_argument("scenario: d0 must be positive");
  if (inflation < 0) throw std::invalid_argument("scenario: inflation must be non-negative");
  if (tau < 0) throw std::invalid_argument("scenario: tau must be non-negative");
  if (total_time <= 0) throw std::invalid_argument("scenario: total_time must be positive");
  if (num_support_states < 2) throw std::invalid_argument("scenario: need >= 2 support states");
  if (n_ip < 0) throw std::invalid_argument("scenario: n_ip must be non-negative");
  if (qc_scale <= 0) throw std::invalid_argument("scenario: qc must be positive");
  if (cell_size <= 0) throw std::invalid_argument("scenario: cell_size must be positive");
  if (robot_radius < 0) throw std::invalid_argument("scenario: robot_radius must be non-negative");
  hinge.validate();

  const int forms = static_cast<int>(!corridor.empty()) + static_cast<int>(!boxes.empty()) +
                    static_cast<int>(!ascii_rows.empty());
  if (corridor.empty() && ascii_rows.empty() && !extent_lo)
    throw std::invalid_argument("scenario: no map description");
  if (forms > 1) throw std::invalid_argument("scenario: more than one map form given");
  for (const auto& s : corridor)
    if (s.length <= 0 || s.width <= 0)
      throw std::invalid_argument("scenario: corridor sections need positive length and width");
  if (!ascii_rows.empty()) {
    const size_t w = ascii_rows.front().size();
    for (const auto& row : ascii_rows)
      if (row.size() != w || w == 0)
        throw std::invalid_argument("scenario: ragged or empty ascii map");
  }
  if (corridor.empty() && (!extent_lo || !extent_hi) && ascii_rows.empty())
    throw std::invalid_argument("scenario: box maps need an extent");
  if (fixed_formation) {
    const auto [r, c] = *fixed_formation;
    if (r < 1 || c < 1 || r * c < num_robots)
      throw std::invalid_argument("scenario: fixed formation cannot hold the team");
  }
  if (start_positions && start_positions->cols() != num_robots)
    throw std::invalid_argument("scenario: explicit starts must cover every robot");
  if (corridor.empty() && !goal)
    throw std::invalid_argument("scenario: goal required for non-corridor maps");
  if (!corridor.empty() && goal) {
    double len = 0.0;
    for (const auto& s : corridor) len += s.length;
    if ((*goal - (start + Vec2(len, 0.0))).norm() > 1e-9)
      throw std::invalid_argument("scenario: corridor goal must sit at the corridor end");
  }
}

Vec2 Scenario::goal_point() const {
  if (goal) return *goal;
  double len = 0.0;
  for (const auto& s : corridor) len += s.length;
  return start + Vec2(len, 0.0);
}

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

double to_number(const std::string& s, const std::string& key) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("scenario: bad numeric value for '" + key + "': " + s);
  }
}

std::pair<int, int> parse_dims(const std::string& s) {
  const size_t x = s.find_first_of("xX");
  if (x == std::string::npos)
    throw std::invalid_argument("scenario: formation must look like RxC: " + s);
  return {static_cast<int>(to_number(s.substr(0, x), "formation")),
          static_cast<int>(to_number(s.substr(x + 1), "formation"))};
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  bool robots_seen = false;
  std::vector<Vec2> starts;

  enum class Section { kNone, kCorridor, kBoxes, kGrid, kStarts };
  Section section = Section::kNone;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const size_t hash = raw.find('#');
    std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
    if (section == Section::kGrid) line = raw;  // '#' is an obstacle cell inside grids
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
      line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    std::string body = line.substr(first);

    if (section != Section::kNone) {
      if (body == "end") {
        section = Section::kNone;
        continue;
      }
      switch (section) {
        case Section::kCorridor: {
          const auto toks = tokenize(body);
          if (toks.size() != 3 || toks[0] != "segment")
            throw std::invalid_argument("scenario: expected 'segment <length> <width>' at line " +
                                        std::to_string(lineno));
          sc.corridor.push_back({to_number(toks[1], "segment"), to_number(toks[2], "segment")});
          break;
        }
        case Section::kBoxes: {
          const auto toks = tokenize(body);
          if (toks.size() == 5 && toks[0] == "extent") {
            sc.extent_lo = Vec2(to_number(toks[1], "extent"), to_number(toks[2], "extent"));
            sc.extent_hi = Vec2(to_number(toks[3], "extent"), to_number(toks[4], "extent"));
          } else if (toks.size() == 5 && toks[0] == "box") {
            sc.boxes.push_back({Vec2(to_number(toks[1], "box"), to_number(toks[2], "box")),
                                Vec2(to_number(toks[3], "box"), to_number(toks[4], "box"))});
          } else {
            throw std::invalid_argument("scenario: expected 'extent' or 'box' at line " +
                                        std::to_string(lineno));
          }
          break;
        }
        case Section::kGrid: {
          for (char ch : body)
            if (ch != '.' && ch != '#')
              throw std::invalid_argument("scenario: grid rows may contain only '.'/'#'");
          sc.ascii_rows.push_back(body);
          break;
        }
        case Section::kStarts: {
          const auto toks = tokenize(body);
          if (toks.size() != 2)
            throw std::invalid_argument("scenario: start rows are 'x y' pairs");
          starts.emplace_back(to_number(toks[0], "starts"), to_number(toks[1], "starts"));
          break;
        }
        case Section::kNone:
          break;
      }
      continue;
    }

    if (body == "corridor:") {
      section = Section::kCorridor;
      continue;
    }
    if (body == "boxes:") {
      section = Section::kBoxes;
      continue;
    }
    if (body == "grid:") {
      section = Section::kGrid;
      continue;
    }
    if (body == "starts:") {
      section = Section::kStarts;
      continue;
    }

    const size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("scenario: expected 'key = value' at line " +
                                  std::to_string(lineno));
    std::string key = body.substr(0, eq);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    const auto vals = tokenize(body.substr(eq + 1));
    if (vals.empty())
      throw std::invalid_argument("scenario: missing value for '" + key + "'");

    auto one = [&]() { return to_number(vals[0], key); };
    auto two = [&]() {
      if (vals.size() != 2)
        throw std::invalid_argument("scenario: '" + key + "' needs two numbers");
      return Vec2(to_number(vals[0], key), to_number(vals[1], key));
    };

    if (key == "robots") {
      sc.num_robots = static_cast<int>(one());
      robots_seen = true;
    } else if (key == "d0")
      sc.d0 = one();
    else if (key == "inflation")
      sc.inflation = one();
    else if (key == "tau")
      sc.tau = one();
    else if (key == "total_time")
      sc.total_time = one();
    else if (key == "support_states")
      sc.num_support_states = static_cast<int>(one());
    else if (key == "n_ip")
      sc.n_ip = static_cast<int>(one());
    else if (key == "qc")
      sc.qc_scale = one();
    else if (key == "eps_obs")
      sc.hinge.eps_obs = one();
    else if (key == "eps_col")
      sc.hinge.eps_col = one();
    else if (key == "eps_form")
      sc.hinge.eps_form = one();
    else if (key == "sigma_obs") {
      sc.hinge.sigma_obs = one();
      sc.sigma_given = true;
    } else if (key == "sigma_col") {
      sc.hinge.sigma_col = one();
      sc.sigma_given = true;
    } else if (key == "sigma_form") {
      sc.hinge.sigma_form = one();
      sc.sigma_given = true;
    } else if (key == "robot_radius")
      sc.robot_radius = one();
    else if (key == "cell_size")
      sc.cell_size = one();
    else if (key == "map_margin")
      sc.map_margin = one();
    else if (key == "start")
      sc.start = two();
    else if (key == "goal")
      sc.goal = two();
    else if (key == "origin")
      sc.grid_origin = two();
    else if (key == "formation")
      sc.fixed_formation = parse_dims(vals[0]);
    else if (key == "lm_max_iterations")
      sc.lm.max_iterations = static_cast<int>(one());
    else if (key == "lm_rel_tol")
      sc.lm.rel_tol = one();
    else
      throw std::invalid_argument("scenario: unknown key '" + key + "'");
  }
  if (section != Section::kNone)
    throw std::invalid_argument("scenario: unterminated section (missing 'end')");
  if (!robots_seen) throw std::invalid_argument("scenario: 'robots' is required");

  if (!starts.empty()) {
    Eigen::Matrix2Xd sp(2, starts.size());
    for (size_t i = 0; i < starts.size(); ++i) sp.col(i) = starts[i];
    sc.start_positions = std::move(sp);
  }
  if (!sc.sigma_given) {
    const HingeParams defaults = default_hinge_for(sc.num_robots);
    sc.hinge.sigma_obs = defaults.sigma_obs;
    sc.hinge.sigma_col = defaults.sigma_col;
    sc.hinge.sigma_form = defaults.sigma_form;
  }
  sc.validate();
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("scenario: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

OccupancyGrid build_occupancy(const Scenario& sc) {
  const double h = sc.cell_size;
  const double margin = sc.map_margin;

  if (!sc.ascii_rows.empty()) {
    const int height = static_cast<int>(sc.ascii_rows.size());
    const int width = static_cast<int>(sc.ascii_rows.front().size());
    OccupancyGrid g(sc.grid_origin, h, width, height);
    // First text row is the top of the map.
    for (int iy = 0; iy < height; ++iy) {
      const std::string& row = sc.ascii_rows[height - 1 - iy];
      for (int ix = 0; ix < width; ++ix)
        if (row[ix] == '#') g.set(ix, iy, true);
    }
    return g;
  }

  if (!sc.corridor.empty()) {
    double total_len = 0.0, max_width = 0.0;
    for (const auto& s : sc.corridor) {
      total_len += s.length;
      max_width = std::max(max_width, s.width);
    }
    const Vec2 lo = sc.start + Vec2(-margin, -max_width / 2.0 - margin);
    const Vec2 hi = sc.start + Vec2(total_len + margin, max_width / 2.0 + margin);
    const int width = static_cast<int>(std::ceil((hi.x() - lo.x()) / h));
    const int height = static_cast<int>(std::ceil((hi.y() - lo.y()) / h));
    OccupancyGrid g(lo, h, width, height);
    // Walls above and below each section; the corridor ends stay open.
    double x = sc.start.x();
    for (const auto& s : sc.corridor) {
      const double half = s.width / 2.0;
      g.fill_box(Vec2(x, sc.start.y() + half), Vec2(x + s.length, hi.y()), true);
      g.fill_box(Vec2(x, lo.y()), Vec2(x + s.length, sc.start.y() - half), true);
      x += s.length;
    }
    return g;
  }

  // Box map.
  const Vec2 lo = *sc.extent_lo - Vec2(margin, margin);
  const Vec2 hi = *sc.extent_hi + Vec2(margin, margin);
  const int width = static_cast<int>(std::ceil((hi.x() - lo.x()) / h));
  const int height = static_cast<int>(std::ceil((hi.y() - lo.y()) / h));
  OccupancyGrid g(lo, h, width, height);
  for (const auto& b : sc.boxes) g.fill_box(b.lo, b.hi, true);
  return g;
}

PiecewisePath scenario_path(const Scenario& sc) {
  PiecewisePath path;
  if (!sc.corridor.empty()) {
    path.points.push_back(sc.start);
    double x = sc.start.x();
    for (size_t i = 0; i + 1 < sc.corridor.size(); ++i) {
      x += sc.corridor[i].length;
      path.points.emplace_back(x, sc.start.y());
    }
    path.points.push_back(sc.goal_point());
  } else {
    path.points.push_back(sc.start);
    path.points.push_back(sc.goal_point());
  }
  path.validate();
  return path;
}

}  // namespace gpform
