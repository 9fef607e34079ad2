#include "egodoa/config.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace egodoa {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Strip a trailing comment, respecting double-quoted strings.
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

json parse_toml_value(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) {
    throw ConfigError("config: empty value on line " +
                      std::to_string(line_no));
  }
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      throw ConfigError("config: unterminated string on line " +
                        std::to_string(line_no));
    }
    return v.substr(1, v.size() - 2);
  }
  if (v == "true") return true;
  if (v == "false") return false;
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  if (v == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    size_t used = 0;
    if (v.find_first_of(".eE") == std::string::npos) {
      const long long i = std::stoll(v, &used);
      if (used == v.size()) return i;
    }
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: cannot parse value '" + v + "' on line " +
                    std::to_string(line_no));
}

// Flat [section] / key = value subset; no arrays, tables-of-tables, or
// multi-line strings.
json parse_toml_subset(const std::string& text) {
  json root = json::object();
  std::string section;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') {
        throw ConfigError("config: malformed section header on line " +
                          std::to_string(line_no));
      }
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) {
        throw ConfigError("config: empty section name on line " +
                          std::to_string(line_no));
      }
      if (!root.contains(section)) root[section] = json::object();
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected key = value on line " +
                        std::to_string(line_no));
    }
    const std::string key = trim(body.substr(0, eq));
    if (key.empty() || section.empty()) {
      throw ConfigError("config: key outside a [section] on line " +
                        std::to_string(line_no));
    }
    root[section][key] = parse_toml_value(body.substr(eq + 1), line_no);
  }
  return root;
}

double as_double(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  throw ConfigError("config: expected a number for " + where);
}

int as_int(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<int>();
  throw ConfigError("config: expected an integer for " + where);
}

bool as_bool(const json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  throw ConfigError("config: expected a boolean for " + where);
}

std::string as_string(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  throw ConfigError("config: expected a string for " + where);
}

void apply_section(RunConfig& cfg, const std::string& section,
                   const json& body) {
  for (const auto& [key, value] : body.items()) {
    const std::string where = section + "." + key;
    bool known = true;
    if (section == "global") {
      if (key == "preset") cfg.preset = as_string(value, where);
      else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(
          as_int(value, where));
      else if (key == "workers") cfg.workers = as_int(value, where);
      else if (key == "out_root") cfg.out_root = as_string(value, where);
      else known = false;
    } else if (section == "simulate") {
      if (key == "scenes") cfg.scenes = as_int(value, where);
      else if (key == "duration_s") cfg.duration_s = as_double(value, where);
      else if (key == "snr_db") cfg.snr_db = as_double(value, where);
      else if (key == "pink_noise") cfg.pink_noise = as_bool(value, where);
      else if (key == "train_frac") cfg.train_frac = as_double(value, where);
      else if (key == "val_frac") cfg.val_frac = as_double(value, where);
      else if (key == "sample_rate")
        cfg.acoustics.sample_rate = as_double(value, where);
      else if (key == "sound_speed")
        cfg.acoustics.sound_speed = as_double(value, where);
      else if (key == "mic_spacing")
        cfg.acoustics.mic_spacing = as_double(value, where);
      else if (key == "head_shadow_strength")
        cfg.acoustics.head_shadow_strength = as_double(value, where);
      else if (key == "reverb_tail_s")
        cfg.acoustics.reverb_tail_s = as_double(value, where);
      else if (key == "source_level_dbfs")
        cfg.acoustics.source_level_dbfs = as_double(value, where);
      else if (key == "room_x") cfg.trajectory.room.x_max = as_double(value, where);
      else if (key == "room_z") cfg.trajectory.room.z_max = as_double(value, where);
      else if (key == "speed_min") cfg.trajectory.speed_min = as_double(value, where);
      else if (key == "speed_max") cfg.trajectory.speed_max = as_double(value, where);
      else if (key == "period_min_s")
        cfg.trajectory.period_min_s = as_double(value, where);
      else if (key == "period_max_s")
        cfg.trajectory.period_max_s = as_double(value, where);
      else if (key == "stop_probability")
        cfg.trajectory.stop_probability = as_double(value, where);
      else if (key == "tick_rate_hz")
        cfg.trajectory.tick_rate_hz = as_double(value, where);
      else if (key == "height_m") cfg.trajectory.height_m = as_double(value, where);
      else if (key == "fov_deg")
        cfg.camera.horizontal_fov_deg = as_double(value, where);
      else if (key == "image_width") cfg.camera.image_width = as_int(value, where);
      else if (key == "image_height") cfg.camera.image_height = as_int(value, where);
      else known = false;
    } else if (section == "featurize") {
      if (key == "window") cfg.features.window = as_int(value, where);
      else if (key == "hop") cfg.features.hop = as_int(value, where);
      else if (key == "n_lags") cfg.features.n_lags = as_int(value, where);
      else if (key == "patch") cfg.features.patch = as_int(value, where);
      else known = false;
    } else if (section == "train") {
      if (key == "epochs") cfg.epochs = as_int(value, where);
      else if (key == "batch") cfg.batch = as_int(value, where);
      else if (key == "lr") cfg.lr = as_double(value, where);
      else if (key == "momentum") cfg.momentum = as_double(value, where);
      else if (key == "sigma") cfg.sigma = as_double(value, where);
      else if (key == "patience") cfg.patience = as_int(value, where);
      else if (key == "depth") cfg.model.depth = as_int(value, where);
      else if (key == "heads") cfg.model.heads = as_int(value, where);
      else if (key == "hidden") cfg.model.hidden = as_int(value, where);
      else if (key == "ff") cfg.model.ff = as_int(value, where);
      else if (key == "pre_ln") cfg.model.pre_ln = as_bool(value, where);
      else known = false;
    } else if (section == "eval") {
      if (key == "baseline_srp") cfg.baseline_srp = as_bool(value, where);
      else if (key == "baseline_audio_only")
        cfg.baseline_audio_only = as_bool(value, where);
      else known = false;
    } else {
      throw ConfigError("config: unknown section [" + section + "]");
    }
    if (!known) throw ConfigError("config: unknown key " + where);
  }
}

void validate(RunConfig& cfg) {
  if (cfg.preset != "desk" && cfg.preset != "paper") {
    throw ConfigError("config: unknown preset '" + cfg.preset + "'");
  }
  if (cfg.scenes <= 0) throw ConfigError("config: scenes must be positive");
  if (cfg.duration_s <= 0) throw ConfigError("config: duration must be positive");
  if (cfg.train_frac < 0 || cfg.val_frac < 0 ||
      cfg.train_frac + cfg.val_frac >= 1.0) {
    throw ConfigError("config: split fractions must leave room for a test set");
  }
  if (cfg.batch <= 0 || cfg.epochs <= 0) {
    throw ConfigError("config: batch and epochs must be positive");
  }
  if (cfg.model.hidden % cfg.model.heads != 0) {
    throw ConfigError("config: hidden must be divisible by heads");
  }
  if (cfg.workers < 1) throw ConfigError("config: workers must be >= 1");
  if (cfg.camera.image_width % cfg.features.patch != 0 ||
      cfg.camera.image_height % cfg.features.patch != 0) {
    throw ConfigError("config: image dimensions must be divisible by patch");
  }
  cfg.features.sample_rate = cfg.acoustics.sample_rate;
  cfg.model.audio_dim = cfg.features.n_lags;
  cfg.model.visual_dim = 3 * cfg.features.patch * cfg.features.patch;
  cfg.model.visual_len = (cfg.camera.image_width / cfg.features.patch) *
                         (cfg.camera.image_height / cfg.features.patch);
}

}  // namespace

RunConfig preset_config(const std::string& name) {
  RunConfig cfg;
  cfg.preset = name;
  if (name == "desk") {
    cfg.model.depth = 1;
    cfg.model.heads = 4;
    cfg.model.hidden = 64;
    cfg.model.ff = 128;
    cfg.batch = 64;
    cfg.lr = 5e-3;
    cfg.momentum = 0.9;
    cfg.epochs = 30;
    cfg.scenes = 8;  // 8 x 250 chunks
  } else if (name == "paper") {
    cfg.model.depth = 2;
    cfg.model.heads = 4;
    cfg.model.hidden = 128;
    cfg.model.ff = 256;
    cfg.batch = 512;
    cfg.lr = 1e-3;
    cfg.momentum = 0.9;
    cfg.epochs = 30;
    cfg.scenes = 64;
  } else {
    throw ConfigError("config: unknown preset '" + name + "'");
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path,
                           const RunConfig& base) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());

  json root;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("config: JSON parse error in " + path.string() + ": " +
                        e.what());
    }
  } else {
    root = parse_toml_subset(text);
  }
  if (!root.is_object()) {
    throw ConfigError("config: top level must be a table/object");
  }

  RunConfig cfg = base;
  // A preset named in the file replaces the base before other keys apply.
  if (root.contains("global") && root["global"].contains("preset")) {
    const std::string preset =
        as_string(root["global"]["preset"], "global.preset");
    if (preset != cfg.preset) cfg = preset_config(preset);
  }
  for (const auto& [section, body] : root.items()) {
    if (!body.is_object()) {
      throw ConfigError("config: section [" + section + "] must be a table");
    }
    apply_section(cfg, section, body);
  }
  validate(cfg);
  return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["global"] = {{"preset", cfg.preset},
                 {"seed", cfg.seed},
                 {"workers", cfg.workers},
                 {"out_root", cfg.out_root.string()}};
  j["simulate"] = {
      {"scenes", cfg.scenes},
      {"duration_s", cfg.duration_s},
      {"snr_db", std::isfinite(cfg.snr_db) ? json(cfg.snr_db) : json("inf")},
      {"pink_noise", cfg.pink_noise},
      {"train_frac", cfg.train_frac},
      {"val_frac", cfg.val_frac},
      {"sample_rate", cfg.acoustics.sample_rate},
      {"sound_speed", cfg.acoustics.sound_speed},
      {"mic_spacing", cfg.acoustics.mic_spacing},
      {"head_shadow_strength", cfg.acoustics.head_shadow_strength},
      {"reverb_tail_s", cfg.acoustics.reverb_tail_s},
      {"source_level_dbfs", cfg.acoustics.source_level_dbfs},
      {"room_x", cfg.trajectory.room.x_max},
      {"room_z", cfg.trajectory.room.z_max},
      {"speed_min", cfg.trajectory.speed_min},
      {"speed_max", cfg.trajectory.speed_max},
      {"period_min_s", cfg.trajectory.period_min_s},
      {"period_max_s", cfg.trajectory.period_max_s},
      {"stop_probability", cfg.trajectory.stop_probability},
      {"tick_rate_hz", cfg.trajectory.tick_rate_hz},
      {"height_m", cfg.trajectory.height_m},
      {"fov_deg", cfg.camera.horizontal_fov_deg},
      {"image_width", cfg.camera.image_width},
      {"image_height", cfg.camera.image_height}};
  j["featurize"] = {{"window", cfg.features.window},
                    {"hop", cfg.features.hop},
                    {"n_lags", cfg.features.n_lags},
                    {"patch", cfg.features.patch}};
  j["train"] = {{"epochs", cfg.epochs},   {"batch", cfg.batch},
                {"lr", cfg.lr},           {"momentum", cfg.momentum},
                {"sigma", cfg.sigma},     {"patience", cfg.patience},
                {"depth", cfg.model.depth}, {"heads", cfg.model.heads},
                {"hidden", cfg.model.hidden}, {"ff", cfg.model.ff},
                {"pre_ln", cfg.model.pre_ln}};
  j["eval"] = {{"baseline_srp", cfg.baseline_srp},
               {"baseline_audio_only", cfg.baseline_audio_only}};
  return j.dump(2) + "\n";
}

}  // namespace egodoa
