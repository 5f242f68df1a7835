#include "procam/service.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <unordered_map>

#include "procam/effects.hpp"
#include "procam/error.hpp"
#include "procam/image_io.hpp"
#include "procam/masks.hpp"
#include "procam/projimage.hpp"
#include "procam/shaderlang.hpp"
#include "procam/simulator.hpp"
#include "procam/slcodec.hpp"

// After Eigen: resolv.h, pulled in by httplib, defines a `_res` macro.
#include <httplib.h>
#include <json.hpp>

namespace procam::service {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Carries an HTTP status through the handlers.
class HttpError : public std::runtime_error {
 public:
  HttpError(int status, const std::string& message, json diagnostics = nullptr)
      : std::runtime_error(message), status(status), diagnostics(std::move(diagnostics)) {}
  int status;
  json diagnostics;
};

[[noreturn]] void fail(int status, const std::string& message) { throw HttpError(status, message); }

Response json_response(int status, const json& body) {
  return {status, "application/json", body.dump()};
}

Response png_response(const std::vector<std::uint8_t>& bytes) {
  return {200, "image/png", std::string(bytes.begin(), bytes.end())};
}

Response error_response(int status, const std::string& message, const json& diagnostics) {
  json body = {{"error", message}};
  if (!diagnostics.is_null()) {
    body["diagnostics"] = diagnostics;
  }
  return json_response(status, body);
}

json size_json(Size s) { return json::array({s.width, s.height}); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json parse_body(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    fail(400, "request body must be a JSON object");
  }
  return doc;
}

PixelCoord read_point(const json& value) {
  if (value.is_array() && value.size() == 2 && value[0].is_number_integer() &&
      value[1].is_number_integer()) {
    return {value[0].get<int>(), value[1].get<int>()};
  }
  if (value.is_object() && value.contains("x") && value.contains("y") &&
      value["x"].is_number_integer() && value["y"].is_number_integer()) {
    return {value["x"].get<int>(), value["y"].get<int>()};
  }
  fail(400, "points must be [x, y] integer pairs");
}

std::vector<PixelCoord> read_points(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc[key].is_array()) {
    fail(400, std::string("'") + key + "' must be an array of [x, y] points");
  }
  std::vector<PixelCoord> points;
  for (const auto& p : doc[key]) {
    points.push_back(read_point(p));
  }
  return points;
}

double read_number(const json& doc, const char* key, double fallback) {
  if (!doc.contains(key)) {
    return fallback;
  }
  if (!doc[key].is_number()) {
    fail(400, std::string("'") + key + "' must be a number");
  }
  return doc[key].get<double>();
}

Size read_size_field(const json& value) {
  if (value.is_string()) {
    try {
      return parse_size(value.get<std::string>());
    } catch (const InvalidArgument& e) {
      fail(400, e.what());
    }
  }
  if (value.is_array() && value.size() == 2 && value[0].is_number_integer() &&
      value[1].is_number_integer()) {
    return {value[0].get<int>(), value[1].get<int>()};
  }
  fail(400, "projector_size must be \"WxH\" or [w, h]");
}

std::string random_id() {
  static std::mutex mutex;
  static std::mt19937_64 engine{std::random_device{}()};
  std::lock_guard lock(mutex);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(engine()));
  return buf;
}

bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 64) {
    return false;
  }
  for (const char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') {
      return false;
    }
  }
  return true;
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t next = path.find('/', pos);
    const std::size_t end = next == std::string_view::npos ? path.size() : next;
    if (end > pos) {
      parts.push_back(path.substr(pos, end - pos));
    }
    pos = end + 1;
  }
  return parts;
}

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << text;
    if (!out) {
      throw FormatError("cannot write " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw FormatError("cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- Session ------------------------------------------------------------------

struct MaskEntry {
  std::string id;
  std::string tool;
  masks::Mask mask;
  std::vector<std::uint8_t> png;
};

struct EffectEntry {
  std::string id;
  json spec;
  std::shared_ptr<const fx::PreparedEffect> prepared;
};

struct Session {
  std::string id;
  std::string created_at;
  std::string source;
  sl::CorrespondenceMap corr;
  projimage::ProjectorImage image;
  std::vector<std::uint8_t> image_png;

  // Creations serialize on create_mutex and do their heavy lifting before
  // briefly taking `mutex` exclusively to publish the result.
  std::mutex create_mutex;
  mutable std::shared_mutex mutex;
  std::vector<std::shared_ptr<const MaskEntry>> masks;
  std::vector<std::shared_ptr<const EffectEntry>> effects;

  std::shared_ptr<const MaskEntry> find_mask(std::string_view mid) const {
    std::shared_lock lock(mutex);
    for (const auto& m : masks) {
      if (m->id == mid) {
        return m;
      }
    }
    return nullptr;
  }

  std::shared_ptr<const EffectEntry> find_effect(std::string_view eid) const {
    std::shared_lock lock(mutex);
    for (const auto& e : effects) {
      if (e->id == eid) {
        return e;
      }
    }
    return nullptr;
  }

  json summary() const {
    std::shared_lock lock(mutex);
    json mask_ids = json::array();
    for (const auto& m : masks) {
      mask_ids.push_back(m->id);
    }
    json effect_ids = json::array();
    for (const auto& e : effects) {
      effect_ids.push_back(e->id);
    }
    return {{"id", id},
            {"created_at", created_at},
            {"source", source},
            {"camera_size", size_json(corr.camera_size())},
            {"projector_size", size_json(image.size())},
            {"valid_fraction", corr.valid_fraction()},
            {"covered_pixels", image.count(projimage::PixelState::Covered)},
            {"filled_pixels", image.count(projimage::PixelState::Filled)},
            {"hole_pixels", image.count(projimage::PixelState::Hole)},
            {"masks", mask_ids},
            {"effects", effect_ids}};
  }
};

// Rebuilt from stored color; coverage is not persisted, so every non-black
// reloaded pixel counts as covered.
projimage::ProjectorImage image_from_color(RgbImage color) {
  projimage::ProjectorImage image(color.size());
  for (int y = 0; y < color.height(); ++y) {
    for (int x = 0; x < color.width(); ++x) {
      const Rgb8 c = color.at(x, y);
      if (c.r != 0 || c.g != 0 || c.b != 0) {
        image.state.at(x, y) = projimage::PixelState::Covered;
        image.coverage.at(x, y) = 1.0;
      }
    }
  }
  image.color = std::move(color);
  return image;
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  mutable std::shared_mutex mutex;
  std::unordered_map<std::string, std::shared_ptr<Session>> sessions;
  std::vector<std::string> order;

  std::shared_ptr<Session> find(std::string_view id) const {
    std::shared_lock lock(mutex);
    const auto it = sessions.find(std::string(id));
    if (it == sessions.end()) {
      fail(404, "unknown session '" + std::string(id) + "'");
    }
    return it->second;
  }

  // --- persistence ------------------------------------------------------------

  fs::path session_dir(const Session& s) const { return options.data_dir / s.id; }

  // Rewrites the session index; called with the session's create_mutex held.
  void persist_index(const Session& s) const {
    if (options.data_dir.empty()) {
      return;
    }
    json masks_json = json::array();
    json effects_json = json::array();
    {
      std::shared_lock lock(s.mutex);
      for (const auto& m : s.masks) {
        masks_json.push_back({{"id", m->id}, {"tool", m->tool}});
      }
      for (const auto& e : s.effects) {
        effects_json.push_back({{"id", e->id}, {"spec", e->spec}});
      }
    }
    const json index = {{"id", s.id},
                        {"created_at", s.created_at},
                        {"source", s.source},
                        {"masks", masks_json},
                        {"effects", effects_json}};
    write_text(session_dir(s) / "session.json", index.dump(2));
  }

  void persist_new_session(const Session& s) const {
    if (options.data_dir.empty()) {
      return;
    }
    const fs::path dir = session_dir(s);
    fs::create_directories(dir / "masks");
    io::write_file(dir / "projector.png", s.image_png);
    sl::write_lfcm(dir / "correspondence.lfcm", s.corr);
    persist_index(s);
  }

  void persist_mask(const Session& s, const MaskEntry& m) const {
    if (options.data_dir.empty()) {
      return;
    }
    io::write_file(session_dir(s) / "masks" / (m.id + ".png"), m.png);
    persist_index(s);
  }

  void load_all() {
    if (options.data_dir.empty()) {
      return;
    }
    fs::create_directories(options.data_dir);
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(options.data_dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "session.json")) {
        dirs.push_back(entry.path());
      }
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<std::pair<std::string, std::shared_ptr<Session>>> loaded;
    for (const auto& dir : dirs) {
      try {
        auto s = load_session(dir);
        loaded.emplace_back(s->created_at, s);
      } catch (const std::exception& e) {
        std::cerr << "skipping session " << dir << ": " << e.what() << "\n";
      }
    }
    std::stable_sort(loaded.begin(), loaded.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, s] : loaded) {
      order.push_back(s->id);
      sessions.emplace(s->id, std::move(s));
    }
  }

  std::shared_ptr<Session> load_session(const fs::path& dir) const {
    const json index = json::parse(read_text(dir / "session.json"));
    auto s = std::make_shared<Session>();
    s->id = index.at("id").get<std::string>();
    if (!valid_id(s->id)) {
      throw FormatError("invalid session id");
    }
    s->created_at = index.value("created_at", "");
    s->source = index.value("source", "");
    s->corr = sl::read_lfcm(dir / "correspondence.lfcm");
    s->image_png = io::read_file(dir / "projector.png");
    s->image = image_from_color(io::decode_png_rgb(s->image_png));
    for (const auto& m : index.at("masks")) {
      auto entry = std::make_shared<MaskEntry>();
      entry->id = m.at("id").get<std::string>();
      entry->tool = m.value("tool", "");
      entry->png = io::read_file(dir / "masks" / (entry->id + ".png"));
      entry->mask = masks::from_gray(io::decode_png_gray(entry->png));
      s->masks.push_back(std::move(entry));
    }
    for (const auto& e : index.at("effects")) {
      auto entry = std::make_shared<EffectEntry>();
      entry->id = e.at("id").get<std::string>();
      entry->spec = e.at("spec");
      entry->prepared = prepare(*s, fx::parse_effect_spec(entry->spec.dump()));
      s->effects.push_back(std::move(entry));
    }
    return s;
  }

  // --- sessions -----------------------------------------------------------------

  std::shared_ptr<Session> build_from_simulation(const json& scene_json) const {
    sim::SceneModel scene;
    if (scene_json.is_string() && scene_json.get<std::string>() == "demo") {
      scene = sim::demo_scene();
    } else if (scene_json.is_object()) {
      // Inline scenes must not name server-side files.
      if (scene_json.contains("planes") && scene_json["planes"].is_array()) {
        for (const auto& plane : scene_json["planes"]) {
          if (plane.is_object() && plane.contains("texture") && plane["texture"].is_string()) {
            fail(400, "inline scenes take procedural textures only");
          }
        }
      }
      try {
        scene = sim::parse_scene(scene_json.dump());
        scene.validate();
      } catch (const Error& e) {
        fail(400, std::string("invalid scene: ") + e.what());
      }
    } else {
      fail(400, "'simulate' must be a scene object or \"demo\"");
    }

    const auto& projector = scene.rig.projector;
    const auto patterns = sl::generate_patterns(projector.width, projector.height);
    const auto captures = sim::simulate_captures(scene, patterns.frames, options.render_threads);
    sl::DecodeOptions decode_options;
    decode_options.threads = options.render_threads;
    auto s = std::make_shared<Session>();
    s->source = "simulate";
    s->corr = sl::decode(captures, patterns.manifest, decode_options);
    // A colour snapshot under flat white light stands in for the camera image.
    const RgbImage color = sim::render_camera_albedo(scene);
    s->image = projimage::fill_holes(
        projimage::reconstruct(s->corr, color, projector.size(), options.render_threads),
        options.fill_radius);
    return s;
  }

  std::shared_ptr<Session> build_from_captures(const json& doc) const {
    if (!doc.is_object()) {
      fail(400, "'captures' must be an object");
    }
    if (!doc.contains("projector_size")) {
      fail(400, "'captures.projector_size' is required");
    }
    const Size proj = read_size_field(doc["projector_size"]);
    sl::PatternManifest manifest;
    try {
      manifest = sl::PatternManifest::for_projector(proj.width, proj.height);
    } catch (const InvalidArgument& e) {
      fail(400, e.what());
    }
    if (!doc.contains("frames") || !doc["frames"].is_array()) {
      fail(400, "'captures.frames' must be an array of base64 PNG strings");
    }
    const auto& frames_json = doc["frames"];
    if (frames_json.size() != manifest.frame_count()) {
      fail(400, "expected " + std::to_string(manifest.frame_count()) + " capture frames for a " +
                    format_size(proj) + " projector, got " +
                    std::to_string(frames_json.size()));
    }
    std::vector<GrayImage> frames;
    frames.reserve(frames_json.size());
    for (const auto& f : frames_json) {
      if (!f.is_string()) {
        fail(400, "capture frames must be base64 strings");
      }
      try {
        frames.push_back(io::decode_png_gray(base64_decode(f.get<std::string>())));
      } catch (const Error& e) {
        fail(400, std::string("bad capture frame: ") + e.what());
      }
    }
    RgbImage color;
    if (doc.contains("color")) {
      if (!doc["color"].is_string()) {
        fail(400, "'captures.color' must be a base64 PNG string");
      }
      try {
        color = io::decode_png_rgb(base64_decode(doc["color"].get<std::string>()));
      } catch (const Error& e) {
        fail(400, std::string("bad colour image: ") + e.what());
      }
    } else {
      color = to_rgb(frames.front());  // the all-white frame
    }
    sl::DecodeOptions decode_options;
    decode_options.threads = options.render_threads;
    decode_options.contrast_threshold = read_number(doc, "contrast_threshold", 0.05);
    auto s = std::make_shared<Session>();
    s->source = "captures";
    try {
      s->corr = sl::decode(frames, manifest, decode_options);
      s->image = projimage::fill_holes(
          projimage::reconstruct(s->corr, color, proj, options.render_threads),
          options.fill_radius);
    } catch (const InvalidArgument& e) {
      fail(400, e.what());
    } catch (const DimensionMismatch& e) {
      fail(400, e.what());
    }
    return s;
  }

  Response create_session(std::string_view body) {
    const json doc = parse_body(body);
    const bool simulate = doc.contains("simulate");
    const bool captures = doc.contains("captures");
    if (simulate == captures) {
      fail(400, "request must contain exactly one of 'simulate' or 'captures'");
    }
    auto s = simulate ? build_from_simulation(doc["simulate"]) : build_from_captures(doc["captures"]);
    if (s->corr.valid_fraction() < 0.01) {
      throw HttpError(422, "decode produced " + std::to_string(s->corr.valid_count()) +
                               " valid pixels (under 1%); the scan looks bad");
    }
    s->created_at = utc_timestamp();
    s->image_png = io::encode_png(s->image.color);
    {
      std::unique_lock lock(mutex);
      do {
        s->id = random_id();
      } while (sessions.count(s->id) != 0);
      sessions.emplace(s->id, s);
      order.push_back(s->id);
    }
    {
      std::lock_guard create(s->create_mutex);
      persist_new_session(*s);
    }
    return json_response(201, s->summary());
  }

  Response list_sessions() const {
    std::vector<std::shared_ptr<Session>> all;
    {
      std::shared_lock lock(mutex);
      for (const auto& id : order) {
        all.push_back(sessions.at(id));
      }
    }
    json list = json::array();
    for (const auto& s : all) {
      list.push_back(s->summary());
    }
    return json_response(200, list);
  }

  // --- masks ----------------------------------------------------------------------

  Response create_mask(Session& s, std::string_view body) {
    const json doc = parse_body(body);
    if (!doc.contains("tool") || !doc["tool"].is_string()) {
      fail(400, "'tool' must be one of magic_wand, quick_select, lasso");
    }
    const std::string tool = doc["tool"].get<std::string>();
    const RgbImage& image = s.image.color;
    const double tolerance = read_number(doc, "tolerance", 30.0);
    masks::Mask mask;
    try {
      if (tool == "magic_wand") {
        if (!doc.contains("seed")) {
          fail(400, "magic_wand needs 'seed'");
        }
        const PixelCoord seed = read_point(doc["seed"]);
        if (!image.contains(seed)) {
          fail(422, "seed (" + std::to_string(seed.x) + ", " + std::to_string(seed.y) +
                        ") is outside the " + format_size(image.size()) + " projector image");
        }
        const double conn = read_number(doc, "connectivity", 8);
        if (conn != 4 && conn != 8) {
          fail(400, "'connectivity' must be 4 or 8");
        }
        mask = masks::magic_wand(image, seed, tolerance,
                                 conn == 4 ? masks::Connectivity::Four : masks::Connectivity::Eight);
      } else if (tool == "quick_select") {
        const auto scribble = read_points(doc, "scribble");
        for (const auto& p : scribble) {
          if (!image.contains(p)) {
            fail(422, "scribble point outside the projector image");
          }
        }
        mask = masks::quick_select(image, scribble, tolerance);
      } else if (tool == "lasso") {
        const auto anchors = read_points(doc, "anchors");
        for (const auto& p : anchors) {
          if (!image.contains(p)) {
            fail(422, "lasso anchor outside the projector image");
          }
        }
        mask = masks::path_to_mask(masks::magnetic_lasso(image, anchors), image.size());
      } else {
        fail(400, "unknown tool '" + tool + "'");
      }
    } catch (const InvalidArgument& e) {
      fail(422, e.what());
    }

    // Brush-style refinement composes with an earlier mask into a new one.
    const std::string mode = doc.value("mode", "replace");
    if (mode != "replace") {
      if (mode != "add" && mode != "subtract" && mode != "intersect") {
        fail(400, "'mode' must be replace, add, subtract or intersect");
      }
      if (!doc.contains("base") || !doc["base"].is_string()) {
        fail(400, "mode '" + mode + "' needs a 'base' mask id");
      }
      const auto base = s.find_mask(doc["base"].get<std::string>());
      if (!base) {
        fail(404, "unknown mask '" + doc["base"].get<std::string>() + "'");
      }
      auto a = base->mask.pixels();
      auto b = mask.pixels();
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (mode == "add") {
          b[i] = static_cast<std::uint8_t>(a[i] | b[i]);
        } else if (mode == "subtract") {
          b[i] = static_cast<std::uint8_t>(a[i] & (b[i] ^ 1U));
        } else {
          b[i] = static_cast<std::uint8_t>(a[i] & b[i]);
        }
      }
    }

    auto entry = std::make_shared<MaskEntry>();
    entry->tool = tool;
    entry->png = io::encode_png(masks::to_gray(mask));
    entry->mask = std::move(mask);
    {
      std::lock_guard create(s.create_mutex);
      {
        std::unique_lock lock(s.mutex);
        entry->id = "m" + std::to_string(s.masks.size() + 1);
        s.masks.push_back(entry);
      }
      persist_mask(s, *entry);
    }
    return json_response(
        201, {{"id", entry->id}, {"tool", tool}, {"area", masks::area(entry->mask)}});
  }

  // --- effects ----------------------------------------------------------------------

  static std::shared_ptr<const fx::PreparedEffect> prepare(const Session& s, fx::EffectSpec spec) {
    std::optional<masks::Mask> mask;
    if (spec.mask) {
      const auto entry = s.find_mask(*spec.mask);
      if (!entry) {
        fail(404, "unknown mask '" + *spec.mask + "'");
      }
      mask = entry->mask;
    }
    return std::make_shared<const fx::PreparedEffect>(std::move(spec), s.image.color,
                                                      std::move(mask));
  }

  Response create_effect(Session& s, std::string_view body) {
    parse_body(body);
    fx::EffectSpec spec;
    try {
      spec = fx::parse_effect_spec(body);
      fx::validate(spec);
    } catch (const Error& e) {
      fail(422, e.what());
    }
    auto entry = std::make_shared<EffectEntry>();
    entry->spec = json::parse(fx::to_json(spec));
    try {
      entry->prepared = prepare(s, std::move(spec));
    } catch (const shader::CompileError& e) {
      json diagnostics = json::array();
      for (const auto& d : e.diagnostics()) {
        diagnostics.push_back({{"line", d.line},
                               {"column", d.column},
                               {"severity", d.severity == shader::Severity::Error ? "error"
                                                                                  : "warning"},
                               {"message", d.message}});
      }
      throw HttpError(422, "shader failed to compile", diagnostics);
    } catch (const InvalidArgument& e) {
      fail(422, e.what());
    }
    {
      std::lock_guard create(s.create_mutex);
      {
        std::unique_lock lock(s.mutex);
        entry->id = "e" + std::to_string(s.effects.size() + 1);
        s.effects.push_back(entry);
      }
      persist_index(s);
    }
    return json_response(201, {{"id", entry->id}, {"spec", entry->spec}});
  }

  Response list_effects(const Session& s) const {
    json list = json::array();
    std::shared_lock lock(s.mutex);
    for (const auto& e : s.effects) {
      list.push_back({{"id", e->id}, {"spec", e->spec}});
    }
    return json_response(200, list);
  }

  Response list_masks(const Session& s) const {
    json list = json::array();
    std::shared_lock lock(s.mutex);
    for (const auto& m : s.masks) {
      list.push_back({{"id", m->id}, {"tool", m->tool}, {"area", masks::area(m->mask)}});
    }
    return json_response(200, list);
  }

  static Response frame(const EffectEntry& e, const std::map<std::string, std::string>& query) {
    double t = 0.0;
    if (const auto it = query.find("t"); it != query.end()) {
      const std::string& text = it->second;
      const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), t);
      if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(t)) {
        fail(400, "t must be a number of seconds");
      }
    }
    if (t < 0.0) {
      fail(400, "t must be non-negative");
    }
    return png_response(io::encode_png(e.prepared->render(t)));
  }

  // --- routing ------------------------------------------------------------------------

  Response route(std::string_view method, std::string_view path,
                 const std::map<std::string, std::string>& query, std::string_view body) {
    const auto parts = split_path(path);
    if (parts.empty() || parts[0] != "api") {
      fail(404, "not found");
    }
    const std::size_t n = parts.size();
    const bool get = method == "GET";
    const bool post = method == "POST";
    auto method_not_allowed = [] { fail(405, "method not allowed"); };

    if (n == 2 && parts[1] == "health") {
      if (!get) method_not_allowed();
      return json_response(200, {{"status", "ok"}});
    }
    if (n < 2 || parts[1] != "sessions") {
      fail(404, "not found");
    }
    if (n == 2) {
      if (post) return create_session(body);
      if (get) return list_sessions();
      method_not_allowed();
    }
    const auto session = find(parts[2]);
    if (n == 3) {
      if (!get) method_not_allowed();
      return json_response(200, session->summary());
    }
    if (n == 4 && parts[3] == "projector-image") {
      if (!get) method_not_allowed();
      return png_response(session->image_png);
    }
    if (parts[3] == "masks") {
      if (n == 4) {
        if (post) return create_mask(*session, body);
        if (get) return list_masks(*session);
        method_not_allowed();
      }
      if (n == 5) {
        if (!get) method_not_allowed();
        const auto mask = session->find_mask(parts[4]);
        if (!mask) fail(404, "unknown mask '" + std::string(parts[4]) + "'");
        return png_response(mask->png);
      }
    }
    if (parts[3] == "effects") {
      if (n == 4) {
        if (post) return create_effect(*session, body);
        if (get) return list_effects(*session);
        method_not_allowed();
      }
      if (n >= 5 && n <= 6) {
        if (!get) method_not_allowed();
        const auto effect = session->find_effect(parts[4]);
        if (!effect) fail(404, "unknown effect '" + std::string(parts[4]) + "'");
        if (n == 5) return json_response(200, {{"id", effect->id}, {"spec", effect->spec}});
        if (parts[5] == "frame") return frame(*effect, query);
      }
    }
    fail(404, "not found");
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->load_all();
}

Service::~Service() = default;

std::size_t Service::session_count() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->sessions.size();
}

Response Service::handle(std::string_view method, std::string_view path,
                         const std::map<std::string, std::string>& query, std::string_view body) {
  try {
    return impl_->route(method, path, query, body);
  } catch (const HttpError& e) {
    return error_response(e.status, e.what(), e.diagnostics);
  } catch (const shader::RuntimeError& e) {
    return error_response(422, e.what(), nullptr);
  } catch (const Error& e) {
    return error_response(500, e.what(), nullptr);
  } catch (const std::exception& e) {
    return error_response(500, std::string("internal error: ") + e.what(), nullptr);
  }
}

// --- HTTP front end -------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  ServerOptions options;
  httplib::Server server;
  int port = -1;

  Impl(Service& s, ServerOptions o) : service(s), options(std::move(o)) {
    server.set_payload_max_length(std::size_t{512} << 20U);
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      std::map<std::string, std::string> query;
      for (const auto& [key, value] : req.params) {
        query.emplace(key, value);
      }
      const Response r = service.handle(req.method, req.path, query, req.body);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    server.Get(R"(/api(/.*)?)", dispatch);
    server.Post(R"(/api(/.*)?)", dispatch);
    server.Put(R"(/api(/.*)?)", dispatch);
    server.Delete(R"(/api(/.*)?)", dispatch);
    server.Patch(R"(/api(/.*)?)", dispatch);
    if (!options.static_dir.empty()) {
      if (!server.set_mount_point("/", options.static_dir.string())) {
        throw InvalidArgument("static directory " + options.static_dir.string() +
                              " does not exist");
      }
    }
  }
};

HttpServer::HttpServer(Service& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->options.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(impl_->options.host);
  } else if (impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) {
    impl_->port = impl_->options.port;
  }
  if (impl_->port <= 0) {
    throw Error("cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
  }
  return impl_->port;
}

void HttpServer::run() {
  if (impl_->port <= 0) {
    bind();
  }
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) {
    impl_->server.stop();
  }
}

}  // namespace procam::service
