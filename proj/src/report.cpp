#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "persist/analysis.hpp"

namespace persist {

std::string format_report_text(const AnalysisReport& report) {
  std::ostringstream os;
  os << "cache: associativity " << report.cache.associativity << ", " << report.cache.num_sets
     << (report.cache.num_sets == 1 ? " set" : " sets") << ", " << report.cache.line_size << "-byte lines\n";

  std::size_t name_width = 5;
  for (const auto& sr : report.sets)
    for (const auto& sc : sr.scopes)
      for (const auto& bv : sc.blocks) name_width = std::max(name_width, bv.block.size());
  std::vector<std::size_t> widths;
  for (DomainKind d : report.domains) widths.push_back(std::max<std::size_t>(domain_name(d).size(), 14));

  for (const auto& sr : report.sets) {
    for (const auto& sc : sr.scopes) {
      os << "\nset " << sr.set << ", scope " << sc.name << " (header " << sc.header << ")\n";
      os << "  " << std::left << std::setw(static_cast<int>(name_width)) << "block";
      for (std::size_t i = 0; i < report.domains.size(); ++i)
        os << "  " << std::setw(static_cast<int>(widths[i])) << domain_name(report.domains[i]);
      os << '\n';
      for (const auto& bv : sc.blocks) {
        os << "  " << std::setw(static_cast<int>(name_width)) << bv.block;
        for (std::size_t i = 0; i < bv.persistent.size(); ++i)
          os << "  " << std::setw(static_cast<int>(widths[i])) << (bv.persistent[i] ? "persistent" : "not-persistent");
        if (!bv.accessed) os << "  (not accessed)";
        os << '\n';
      }
    }
  }
  if (!report.stats.empty()) {
    os << "\nstatistics\n";
    for (const auto& st : report.stats) {
      os << "  set " << st.set << ", scope " << st.scope << ", " << domain_name(st.domain) << ": " << st.iterations
         << " iterations";
      if (st.domain == DomainKind::Exact) os << ", " << st.peak_zdd_nodes << " peak ZDD nodes";
      os << '\n';
    }
  }
  std::string text = os.str();
  // setw pads trailing columns; strip the padding for stable diffs.
  std::string out;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    line.erase(line.find_last_not_of(' ') + 1);
    out += line;
    out += '\n';
  }
  return out;
}

std::string format_report_json(const AnalysisReport& report) {
  using Json = nlohmann::ordered_json;
  Json root;
  root["format_version"] = 1;
  root["cache"] = {{"associativity", report.cache.associativity},
                   {"num_sets", report.cache.num_sets},
                   {"line_size", report.cache.line_size}};
  Json domains = Json::array();
  for (DomainKind d : report.domains) domains.push_back(std::string(domain_name(d)));
  root["domains"] = domains;
  Json sets = Json::array();
  for (const auto& sr : report.sets) {
    Json scopes = Json::array();
    for (const auto& sc : sr.scopes) {
      Json blocks = Json::array();
      for (const auto& bv : sc.blocks) {
        Json verdicts = Json::object();
        for (std::size_t i = 0; i < report.domains.size(); ++i)
          verdicts[std::string(domain_name(report.domains[i]))] = bv.persistent[i] ? "persistent" : "not-persistent";
        blocks.push_back(Json{{"block", bv.block}, {"accessed", bv.accessed}, {"classification", verdicts}});
      }
      scopes.push_back(Json{{"scope", sc.name}, {"header", sc.header}, {"blocks", blocks}});
    }
    sets.push_back(Json{{"set", sr.set}, {"scopes", scopes}});
  }
  root["sets"] = sets;
  Json stats = Json::array();
  for (const auto& st : report.stats) {
    Json entry{{"set", st.set},
               {"scope", st.scope},
               {"domain", std::string(domain_name(st.domain))},
               {"iterations", st.iterations}};
    if (st.domain == DomainKind::Exact) entry["peak_zdd_nodes"] = st.peak_zdd_nodes;
    stats.push_back(entry);
  }
  root["statistics"] = stats;
  return root.dump(2) + "\n";
}

std::string format_differential_text(const DifferentialReport& report) {
  std::ostringstream os;
  os << "reference: exact\nsubject: " << domain_name(report.subject) << '\n';
  auto list = [&](const char* what, const std::vector<Discrepancy>& items) {
    for (const auto& d : items)
      os << what << ": set " << d.set << ", scope " << d.scope << ", block " << d.block << ", first at " << d.location
         << '\n';
    std::set<std::string> blocks;
    for (const auto& d : items) blocks.insert(d.block);
    os << what << " blocks:";
    for (const auto& b : blocks) os << ' ' << b;
    os << " (" << blocks.size() << ")\n";
  };
  list("gap", report.gaps);
  list("violation", report.violations);
  os << "verdict: " << (report.sound() ? "sound" : "SOUNDNESS VIOLATION") << '\n';
  return os.str();
}

}  // namespace persist
