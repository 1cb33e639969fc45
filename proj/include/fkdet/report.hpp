#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fkdet/errors.hpp"
#include "fkdet/estimators.hpp"

#include "json.hpp"

namespace fkdet {

// One emitted row of an experiment. log_estimate is finite unless minus_inf
// is set, in which case the serialized value is the literal "-inf".
struct ReportRecord {
  std::string scheme;
  std::int64_t size = 0;
  double log_estimate = 0.0;
  bool minus_inf = false;
  std::string certificate;
  double wall_ms = 0.0;
  std::int64_t excluded = 0;
  std::string note;

  bool operator==(const ReportRecord&) const = default;
};

inline ReportRecord to_record(const DetEstimate& est, std::string note = "") {
  ReportRecord r;
  r.scheme = scheme_name(est.scheme);
  r.size = est.size;
  r.log_estimate = est.minus_infinity ? 0.0 : est.log_value;
  r.minus_inf = est.minus_infinity;
  r.certificate = est.certificate;
  r.excluded = est.excluded;
  r.note = std::move(note);
  return r;
}

// Fixed 17-significant-digit formatting so identical runs emit identical bytes.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace report_detail {

inline std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace report_detail

// JSON: one object per record, keys in a fixed alphabetical order.
inline void emit_json(const std::vector<ReportRecord>& records, std::ostream& os) {
  os << "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ReportRecord& r = records[i];
    os << "  {";
    os << "\"certificate\":\"" << report_detail::json_escape(r.certificate) << "\",";
    os << "\"excluded\":" << r.excluded << ",";
    if (r.minus_inf)
      os << "\"log_estimate\":\"-inf\",";
    else
      os << "\"log_estimate\":" << format_double(r.log_estimate) << ",";
    os << "\"note\":\"" << report_detail::json_escape(r.note) << "\",";
    os << "\"scheme\":\"" << report_detail::json_escape(r.scheme) << "\",";
    os << "\"size\":" << r.size << ",";
    os << "\"wall_ms\":" << format_double(r.wall_ms);
    os << "}" << (i + 1 < records.size() ? "," : "") << "\n";
  }
  os << "]\n";
}

// CSV per RFC 4180, header always present.
inline void emit_csv(const std::vector<ReportRecord>& records, std::ostream& os) {
  os << "scheme,size,log_estimate,certificate,wall_ms,excluded,note\r\n";
  for (const ReportRecord& r : records) {
    os << report_detail::csv_quote(r.scheme) << "," << r.size << ","
       << (r.minus_inf ? std::string("-inf") : format_double(r.log_estimate)) << ","
       << report_detail::csv_quote(r.certificate) << "," << format_double(r.wall_ms) << ","
       << r.excluded << "," << report_detail::csv_quote(r.note) << "\r\n";
  }
}

// Minimal self-contained SVG line chart: one polyline per scheme, log-estimate
// against size parameter. Convenience output only; -inf points are skipped.
inline void emit_svg(const std::vector<ReportRecord>& records, std::ostream& os) {
  const double width = 640, height = 400, left = 60, right = 20, top = 30, bottom = 40;
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const ReportRecord& r : records) {
    if (r.minus_inf) continue;
    const double x = static_cast<double>(r.size);
    if (!any) {
      xmin = xmax = x;
      ymin = ymax = r.log_estimate;
      any = true;
    } else {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, r.log_estimate);
      ymax = std::max(ymax, r.log_estimate);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  const auto px = [&](double x) {
    return left + (x - xmin) / (xmax - xmin) * (width - left - right);
  };
  const auto py = [&](double y) {
    return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom);
  };

  static const char* palette[] = {"#1f6fb2", "#c0392b", "#1e8449", "#7d3c98", "#b7950b"};
  std::vector<std::string> schemes;
  for (const ReportRecord& r : records)
    if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end())
      schemes.push_back(r.scheme);

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
     << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
     << height - bottom << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left << "\" y=\"" << height - bottom + 16
     << "\" font-size=\"11\">" << format_double(xmin) << "</text>\n";
  os << "<text x=\"" << width - right - 40 << "\" y=\"" << height - bottom + 16
     << "\" font-size=\"11\">" << format_double(xmax) << "</text>\n";
  os << "<text x=\"4\" y=\"" << py(ymin) << "\" font-size=\"11\">" << format_double(ymin)
     << "</text>\n";
  os << "<text x=\"4\" y=\"" << py(ymax) << "\" font-size=\"11\">" << format_double(ymax)
     << "</text>\n";

  for (std::size_t s = 0; s < schemes.size(); ++s) {
    const char* color = palette[s % 5];
    std::string points;
    for (const ReportRecord& r : records) {
      if (r.scheme != schemes[s] || r.minus_inf) continue;
      points += format_double(px(static_cast<double>(r.size))) + "," +
                format_double(py(r.log_estimate)) + " ";
    }
    if (!points.empty())
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
         << points << "\"/>\n";
    os << "<text x=\"" << width - right - 150 << "\" y=\"" << top + 14.0 * (s + 1)
       << "\" font-size=\"12\" fill=\"" << color << "\">" << report_detail::json_escape(schemes[s])
       << "</text>\n";
  }
  os << "</svg>\n";
}

inline std::vector<ReportRecord> ingest_json(std::istream& is) {
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("cannot parse report JSON: ") + e.what());
  }
  if (!doc.is_array()) throw io_error("report JSON must be an array of records");
  std::vector<ReportRecord> out;
  for (const auto& obj : doc) {
    try {
      ReportRecord r;
      r.scheme = obj.at("scheme").get<std::string>();
      r.size = obj.at("size").get<std::int64_t>();
      const auto& le = obj.at("log_estimate");
      if (le.is_string()) {
        if (le.get<std::string>() != "-inf") throw io_error("bad log_estimate literal");
        r.minus_inf = true;
      } else {
        r.log_estimate = le.get<double>();
      }
      r.certificate = obj.at("certificate").get<std::string>();
      r.wall_ms = obj.at("wall_ms").get<double>();
      r.excluded = obj.at("excluded").get<std::int64_t>();
      r.note = obj.at("note").get<std::string>();
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw io_error(std::string("record schema violation: ") + e.what());
    }
  }
  return out;
}

}  // namespace fkdet
