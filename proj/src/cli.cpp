#include "limner/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "limner/corpus.hpp"
#include "limner/document.hpp"
#include "limner/error.hpp"
#include "limner/faces.hpp"
#include "limner/image.hpp"
#include "limner/report.hpp"
#include "limner/service.hpp"
#include "limner/stats.hpp"
#include "limner/synth.hpp"

namespace limner {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path corpus_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kCorpusEnvVar); env && *env) return env;
  throw UsageError(std::string("no corpus given: pass --corpus or set ") + kCorpusEnvVar);
}

faces::Size parse_target(const std::string& s) {
  static const std::regex re(R"((\d{1,5})[xX](\d{1,5}))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw UsageError("--target must look like 256x256, got '" + s + "'");
  faces::Size size{std::stoi(m[1]), std::stoi(m[2])};
  if (size.width < 1 || size.height < 1) throw UsageError("--target dimensions must be positive");
  return size;
}

// nullopt = whole paintings.
std::optional<std::set<PoseGaze>> parse_categories(const std::string& s) {
  if (s == "paintings") return std::nullopt;
  std::set<PoseGaze> out;
  if (s == "all") {
    out.insert(std::begin(kAllPoseGaze), std::end(kAllPoseGaze));
    return out;
  }
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto c = pose_gaze_from_code(item);
    if (!c) throw UsageError("unknown category '" + item + "' (use LL, LF, FF, RF, RR, OTHER, all or paintings)");
    out.insert(*c);
  }
  if (out.empty()) throw UsageError("--categories is empty");
  return out;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

void report_warnings(const std::vector<CorpusWarning>& ws, std::ostream& err) {
  for (const auto& w : ws) err << "warning: " << w.id << ": " << w.message << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perspective, shadow and eyelight analysis of annotated paintings", "limner"};
  app.require_subcommand(1);

  std::string corpus_flag;
  std::string out_path;
  std::string format = "csv";
  std::string table;
  std::string external;
  std::string kind_name;
  double human_length_m = 1.65;
  int bin_years = 25;
  double bin_width_deg = 15.0;
  std::optional<double> focal_px;
  std::string target_str;
  std::string categories = "all";
  std::string spec_path;
  std::string bind = "127.0.0.1:8080";
  std::string ui_dir;
  std::vector<std::string> files;

  auto add_corpus = [&](CLI::App* sub) {
    sub->add_option("--corpus", corpus_flag, std::string("Corpus directory (default: $") + kCorpusEnvVar + ")");
  };

  auto* analyze = app.add_subcommand("analyze", "Run an analysis over the corpus and print CSV or JSON");
  analyze->add_option("kind", kind_name, "perspective | shadows | eyelights | categories")
      ->required()
      ->check(CLI::IsMember({"perspective", "shadows", "eyelights", "categories"}));
  add_corpus(analyze);
  analyze->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  analyze->add_option("--out", out_path, "Write to this file instead of stdout");
  analyze->add_option("--table", table, "Table to print (shadows: fits|deviations|correlation; "
                                        "eyelights: histogram|tilts|temporal|interocular|compare)");
  analyze->add_option("--external", external, "External histogram CSV (angle_deg,percentage)");
  analyze->add_option("--human-length-m", human_length_m, "Assumed figure height in metres");
  analyze->add_option("--bin-years", bin_years, "Year bin width");
  analyze->add_option("--bin-width-deg", bin_width_deg, "Tilt histogram bin width");
  analyze->add_option("--focal-px", focal_px, "Focal distance for the shadow fit (default: image width)");

  auto* average = app.add_subcommand("average", "Average face crops or whole paintings into a PNG");
  add_corpus(average);
  average->add_option("--categories", categories, "Comma list of LL,LF,FF,RF,RR,OTHER, or all, or paintings");
  average->add_option("--target", target_str, "Output size WxH (default 128x128 faces, 256x256 paintings)");
  average->add_option("--out", out_path, "PNG path")->required();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
  synth->add_option("--spec", spec_path, "Scene spec JSON")->required();
  synth->add_option("--out", out_path, "Output corpus directory")->required();

  auto* serve = app.add_subcommand("serve", "Serve the corpus over HTTP for the annotator");
  add_corpus(serve);
  serve->add_option("--bind", bind, "host:port");
  serve->add_option("--ui-dir", ui_dir, "Directory holding the UI bundle");

  auto* validate = app.add_subcommand("validate", "Check annotation documents");
  add_corpus(validate);
  validate->add_option("files", files, "Validate these files instead of a corpus");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << "run '" << app.get_subcommands().front()->get_name() << " --help' for usage\n";
    } else {
      err << "run '--help' for usage\n";
    }
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      report::AnalyzeOptions opt;
      opt.human_length_m = human_length_m;
      opt.bin_years = bin_years;
      opt.bin_width_deg = bin_width_deg;
      opt.focal_px = focal_px;
      opt.table = table;
      if (!external.empty()) opt.external_csv = external;
      const auto root = corpus_root(corpus_flag);
      const auto corpus = load_corpus(root);
      const auto result = report::analyze(*report::kind_from_string(kind_name), corpus, opt);
      emit(format == "csv" ? result.csv : result.json.dump(2) + "\n", out_path, out);
      for (const auto& w : result.warnings) err << "warning: " << (w.id.empty() ? "corpus" : w.id) << ": " << w.message << '\n';
      return kExitOk;
    }

    if (average->parsed()) {
      const auto selection = parse_categories(categories);
      const auto root = corpus_root(corpus_flag);
      auto corpus = load_corpus(root);
      report_warnings(corpus.warnings, err);
      // The index may name the image when the document leaves it blank.
      for (auto& doc : corpus.documents) {
        const auto* entry = corpus.index.find(doc.meta.id);
        if (entry && !entry->image_path.empty()) doc.meta.image_path = entry->image_path;
      }
      faces::AverageImage avg;
      if (selection) {
        avg = faces::average_faces_by_category(corpus.documents, root, *selection,
                                               target_str.empty() ? faces::kDefaultFaceTarget : parse_target(target_str));
      } else {
        avg = faces::average_paintings(corpus.documents, root,
                                       target_str.empty() ? faces::kDefaultPaintingTarget : parse_target(target_str));
      }
      image::write_png(out_path, avg.to_srgb8());
      err << "averaged " << avg.n_images << " images into " << out_path << '\n';
      return kExitOk;
    }

    if (synth->parsed()) {
      nlohmann::json spec;
      try {
        spec = nlohmann::json::parse(read_file(spec_path));
      } catch (const nlohmann::json::exception& e) {
        throw synth::SynthError(spec_path + ": " + e.what());
      }
      synth::write_synthetic_corpus(spec, out_path);
      return kExitOk;
    }

    if (serve->parsed()) {
      const auto root = corpus_root(corpus_flag);
      std::pair<std::string, int> addr;
      try {
        addr = parse_bind(bind);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      Service service(root, ui_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(ui_dir));
      service.bind(addr.first, addr.second);
      err << "serving " << root.string() << " on http://" << bind << '\n';
      service.listen();
      return kExitOk;
    }

    if (validate->parsed()) {
      int bad = 0;
      if (!files.empty()) {
        for (const auto& f : files) {
          try {
            load_document(f);
            out << f << ": ok\n";
          } catch (const DocumentError& e) {
            out << f << ": " << e.error_class() << " error: " << e.what() << '\n';
            ++bad;
          } catch (const IoError& e) {
            out << f << ": " << e.what() << '\n';
            ++bad;
          }
        }
      } else {
        const auto corpus = load_corpus(corpus_root(corpus_flag));
        for (const auto& w : corpus.warnings) out << w.id << ": " << w.message << '\n';
        bad = static_cast<int>(corpus.warnings.size());
        out << corpus.documents.size() << " valid, " << bad << " invalid\n";
      }
      return bad == 0 ? kExitOk : kExitData;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    // Corpus, document, analysis, image, synth and I/O failures.
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace limner
