#ifndef MASSES_INGESTION_HPP
#define MASSES_INGESTION_HPP

#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "masses/answer_model.hpp"
#include "masses/embedding_table.hpp"
#include "masses/taxonomy.hpp"

namespace masses {

enum class AnnotationFormat { kVqaJson, kSimpleJsonl };

inline AnnotationFormat parse_annotation_format(std::string_view name) {
  if (name == "vqa-json") return AnnotationFormat::kVqaJson;
  if (name == "simple-jsonl") return AnnotationFormat::kSimpleJsonl;
  throw InputError("unknown annotation format '" + std::string(name) +
                   "' (expected vqa-json or simple-jsonl)");
}

namespace detail {

inline QuestionId parse_question_id(const nlohmann::json& j, const std::string& where) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  throw InputError(where + ": question_id must be an integer or a string");
}

inline nlohmann::json question_id_json(const QuestionId& id) {
  if (const auto* i = std::get_if<std::int64_t>(&id)) return *i;
  return std::get<std::string>(id);
}

inline std::optional<std::string> optional_string(const nlohmann::json& record, const char* key,
                                                  const std::string& where) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InputError(where + ": '" + key + "' must be a string");
  return it->get<std::string>();
}

inline std::string where_with_id(const std::string& where, const nlohmann::json& record) {
  auto it = record.find("question_id");
  if (it == record.end() || !(it->is_string() || it->is_number_integer())) return where;
  return where + " (question_id " + (it->is_string() ? it->get<std::string>() : it->dump()) + ")";
}

inline nlohmann::json parse_json(std::istream& in, const std::string& source) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
}

inline void reject_duplicate_ids(const std::vector<QuestionId>& ids, const std::string& source) {
  std::set<QuestionId> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw InputError(source + ": duplicate question_id " + to_string(id));
    }
  }
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  return in;
}

}  // namespace detail

/// Annotation file with a top-level "annotations" array; each record needs
/// question_id and answers[].answer, everything else is optional.
inline std::vector<RawAnnotation> parse_vqa_json(std::istream& in, const std::string& source) {
  const auto doc = detail::parse_json(in, source);
  if (!doc.is_object() || !doc.contains("annotations") || !doc["annotations"].is_array()) {
    throw InputError(source + ": expected an object with an 'annotations' array");
  }
  std::vector<RawAnnotation> out;
  std::vector<QuestionId> ids;
  std::size_t index = 0;
  for (const auto& record : doc["annotations"]) {
    const std::string where =
        detail::where_with_id(source + ": annotations[" + std::to_string(index++) + "]", record);
    if (!record.is_object()) throw InputError(where + ": record is not an object");
    if (!record.contains("question_id")) throw InputError(where + ": missing question_id");
    RawAnnotation a;
    a.question_id = detail::parse_question_id(record["question_id"], where);
    auto answers = record.find("answers");
    if (answers == record.end() || !answers->is_array() || answers->empty()) {
      throw InputError(where + ": 'answers' must be a non-empty array");
    }
    for (const auto& ans : *answers) {
      if (!ans.is_object() || !ans.contains("answer") || !ans["answer"].is_string()) {
        throw InputError(where + ": every answers[] entry needs a string 'answer'");
      }
      a.answers.push_back(ans["answer"].get<std::string>());
    }
    a.question = detail::optional_string(record, "question", where);
    a.answer_type = detail::optional_string(record, "answer_type", where);
    ids.push_back(a.question_id);
    out.push_back(std::move(a));
  }
  detail::reject_duplicate_ids(ids, source);
  return out;
}

/// One JSON object per line: question_id, answers (array of strings),
/// optional question and answer_type. Blank lines are skipped.
inline std::vector<RawAnnotation> parse_simple_jsonl(std::istream& in, const std::string& source) {
  std::vector<RawAnnotation> out;
  std::vector<QuestionId> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string at = source + ":" + std::to_string(line_no);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(at + ": column " + std::to_string(e.byte) + ": malformed JSON");
    }
    const std::string where = detail::where_with_id(at, record);
    if (!record.is_object()) throw InputError(where + ": record is not an object");
    if (!record.contains("question_id")) throw InputError(where + ": missing question_id");
    RawAnnotation a;
    a.question_id = detail::parse_question_id(record["question_id"], where);
    auto answers = record.find("answers");
    if (answers == record.end() || !answers->is_array() || answers->empty()) {
      throw InputError(where + ": 'answers' must be a non-empty array");
    }
    for (const auto& ans : *answers) {
      if (!ans.is_string()) throw InputError(where + ": answers must be strings");
      a.answers.push_back(ans.get<std::string>());
    }
    a.question = detail::optional_string(record, "question", where);
    a.answer_type = detail::optional_string(record, "answer_type", where);
    ids.push_back(a.question_id);
    out.push_back(std::move(a));
  }
  detail::reject_duplicate_ids(ids, source);
  return out;
}

inline std::vector<RawAnnotation> load_annotations(const std::string& path, AnnotationFormat format) {
  auto in = detail::open_or_throw(path);
  return format == AnnotationFormat::kVqaJson ? parse_vqa_json(in, path) : parse_simple_jsonl(in, path);
}

inline void write_simple_jsonl(std::ostream& out, const std::vector<RawAnnotation>& annotations) {
  for (const auto& a : annotations) {
    nlohmann::ordered_json record;
    record["question_id"] = detail::question_id_json(a.question_id);
    if (a.question) record["question"] = *a.question;
    record["answers"] = a.answers;
    if (a.answer_type) record["answer_type"] = *a.answer_type;
    out << record.dump() << '\n';
  }
}

/// JSON array of {question_id, answer}.
inline std::vector<Prediction> parse_predictions(std::istream& in, const std::string& source) {
  const auto doc = detail::parse_json(in, source);
  if (!doc.is_array()) throw InputError(source + ": predictions must be a JSON array");
  std::vector<Prediction> out;
  std::vector<QuestionId> ids;
  std::size_t index = 0;
  for (const auto& record : doc) {
    const std::string where =
        detail::where_with_id(source + ": [" + std::to_string(index++) + "]", record);
    if (!record.is_object()) throw InputError(where + ": record is not an object");
    if (!record.contains("question_id")) throw InputError(where + ": missing question_id");
    if (!record.contains("answer") || !record["answer"].is_string()) {
      throw InputError(where + ": missing string 'answer'");
    }
    Prediction p{detail::parse_question_id(record["question_id"], where),
                 record["answer"].get<std::string>()};
    ids.push_back(p.question_id);
    out.push_back(std::move(p));
  }
  detail::reject_duplicate_ids(ids, source);
  return out;
}

inline std::vector<Prediction> load_predictions(const std::string& path) {
  auto in = detail::open_or_throw(path);
  return parse_predictions(in, path);
}

/// Normalization settings from JSON. Missing keys keep their defaults; the
/// "word_numbers" and "contractions" objects replace the built-in tables.
inline NormalizationConfig normalization_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("normalization config must be a JSON object");
  NormalizationConfig c;
  auto flag = [&](const char* key, bool& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) throw InputError(std::string("normalization '") + key + "' must be a boolean");
    field = j[key].get<bool>();
  };
  flag("lowercase", c.lowercase);
  flag("punctuation_rules", c.punctuation_rules);
  flag("word_numbers_to_digits", c.word_numbers_to_digits);
  flag("strip_articles", c.strip_articles);
  flag("expand_contractions", c.expand_contractions);
  flag("collapse_whitespace", c.collapse_whitespace);
  auto table = [&](const char* key, std::map<std::string, std::string, std::less<>>& field) {
    if (!j.contains(key)) return;
    if (!j[key].is_object()) throw InputError(std::string("normalization '") + key + "' must be an object");
    field.clear();
    for (const auto& [from, to] : j[key].items()) {
      if (!to.is_string()) throw InputError(std::string("normalization '") + key + "' values must be strings");
      field[from] = to.get<std::string>();
    }
  };
  table("word_numbers", c.word_numbers);
  table("contractions", c.contractions);
  return c;
}

inline NormalizationConfig load_normalization_config(const std::string& path) {
  auto in = detail::open_or_throw(path);
  return normalization_from_json(detail::parse_json(in, path));
}

}  // namespace masses

#endif  // MASSES_INGESTION_HPP
