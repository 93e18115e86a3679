#include "ssm/nle.hpp"

#include <cctype>
#include <functional>

#include "ssm/util.hpp"

namespace ssm::nle {

TemplateSet TemplateSet::defaults() {
  TemplateSet t;
  t.contradiction_same = "{x1} is not the same as {x2}";
  t.contradiction_cross = "if the {slot_k} of sentence 1 is {x1}, then the {slot_l} of sentence 2 cannot be {x2}";
  t.entailment_same = "{x1} is the same as {x2}";
  t.entailment_cross = "if the {slot_k} of sentence 1 is {x1}, then the {slot_l} of sentence 2 has to be {x2}";
  t.neutral = "there is no indication that the {slot_l} of sentence 2 is {x2}";
  t.joiner = " and ";
  for (auto s : kAllSlots) t.slot_names[slot_index(s)] = std::string(to_string(s));
  return t;
}

TemplateSet TemplateSet::parse(std::string_view text, const std::string& source) {
  TemplateSet t = defaults();
  const auto lines = split(text, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw FormatError(source, n + 1, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key == "contradiction.same") {
      t.contradiction_same = value;
    } else if (key == "contradiction.cross") {
      t.contradiction_cross = value;
    } else if (key == "entailment.same") {
      t.entailment_same = value;
    } else if (key == "entailment.cross") {
      t.entailment_cross = value;
    } else if (key == "neutral") {
      t.neutral = value;
    } else if (key == "joiner") {
      t.joiner = value;
    } else if (key.rfind("slot.", 0) == 0) {
      const auto slot = parse_slot(key.substr(5));
      if (!slot) throw FormatError(source, n + 1, "unknown slot '" + key.substr(5) + "'");
      t.slot_names[slot_index(*slot)] = value;
    } else {
      throw FormatError(source, n + 1, "unknown template key '" + key + "'");
    }
  }
  return t;
}

TemplateSet TemplateSet::load(const std::filesystem::path& path) { return parse(read_file(path), path.string()); }

SlotTexts slot_texts(const SentenceSlots& slots) {
  SlotTexts out;
  for (auto s : kAllSlots) {
    if (slots.has(s)) out[slot_index(s)] = slots.at(s).text;
  }
  return out;
}

RelationState label_of(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::contradiction_same:
    case ClauseKind::contradiction_cross: return RelationState::contradiction;
    case ClauseKind::entailment_same:
    case ClauseKind::entailment_cross: return RelationState::entailment;
    case ClauseKind::neutral: return RelationState::neutral;
  }
  return RelationState::neutral;
}

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

const std::string& text_of(const SlotTexts& texts, Slot s, const char* side) {
  const auto& t = texts[slot_index(s)];
  if (!t) throw ContractViolation(std::string("no ") + side + " text for slot " + std::string(to_string(s)));
  return *t;
}

std::string fill(std::string tmpl, const TemplateSet& templates, std::optional<SlotPair> pair, Slot column,
                 const std::string& x1, const std::string& x2) {
  if (pair) replace_all(tmpl, "{slot_k}", templates.slot_name(pair->premise));
  replace_all(tmpl, "{slot_l}", templates.slot_name(column));
  replace_all(tmpl, "{x1}", x1);
  replace_all(tmpl, "{x2}", x2);
  return tmpl;
}

}  // namespace

LabeledExplanation generate_nle(const ZAssignment& z, RelationState label, std::span<const Slot> columns,
                                const SlotTexts& premise, const SlotTexts& hypothesis, const TemplateSet& templates) {
  if (eval_rules(z, columns) != label) {
    throw ContractViolation("assignment does not produce label " + std::string(to_string(label)));
  }
  LabeledExplanation out;
  out.label = label;
  std::vector<std::string> clauses;

  if (label == RelationState::neutral) {
    for (auto l : columns) {
      bool entailed = false;
      for (const auto& [p, state] : z) entailed = entailed || (p.hypothesis == l && state == RelationState::entailment);
      if (entailed) continue;
      clauses.push_back(fill(templates.neutral, templates, std::nullopt, l, "", text_of(hypothesis, l, "hypothesis")));
      for (const auto& [p, state] : z) {
        if (p.hypothesis == l) out.responsible_pairs.push_back({p, state});
      }
    }
  } else {
    const bool contra = label == RelationState::contradiction;
    for (const auto& [p, state] : z) {
      if (state != label) continue;
      const auto& tmpl = p.same_slot() ? (contra ? templates.contradiction_same : templates.entailment_same)
                                       : (contra ? templates.contradiction_cross : templates.entailment_cross);
      clauses.push_back(fill(tmpl, templates, p, p.hypothesis, text_of(premise, p.premise, "premise"),
                             text_of(hypothesis, p.hypothesis, "hypothesis")));
      out.responsible_pairs.push_back({p, state});
    }
  }
  if (clauses.empty()) throw ContractViolation("assignment yields no explanation clause");

  for (std::size_t i = 0; i < clauses.size(); ++i) {
    if (i > 0) out.nle += templates.joiner;
    out.nle += clauses[i];
  }
  out.nle[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out.nle[0])));
  out.nle += '.';
  return out;
}

LabeledExplanation explain(const EmbeddedExample& example, const SurrogateModel& model, const TemplateSet& templates) {
  const auto active = active_pairs(model.structure, example);
  const auto marginals = model.marginals(example, active);
  const auto label = predict_label_exact(marginals, active).argmax();
  const auto z = map_assignment(marginals, label, active);
  return generate_nle(z, label, active.columns, slot_texts(example.premise), slot_texts(example.hypothesis), templates);
}

namespace {

struct Segment {
  enum Kind { literal, x1, x2, slot_k, slot_l } kind;
  std::string text;
};

std::vector<Segment> segments(const std::string& tmpl) {
  std::vector<Segment> out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find('{', pos);
    if (open == std::string::npos) {
      out.push_back({Segment::literal, tmpl.substr(pos)});
      break;
    }
    if (open > pos) out.push_back({Segment::literal, tmpl.substr(pos, open - pos)});
    const auto close = tmpl.find('}', open);
    const auto name = tmpl.substr(open + 1, close - open - 1);
    if (name == "x1") {
      out.push_back({Segment::x1, {}});
    } else if (name == "x2") {
      out.push_back({Segment::x2, {}});
    } else if (name == "slot_k") {
      out.push_back({Segment::slot_k, {}});
    } else if (name == "slot_l") {
      out.push_back({Segment::slot_l, {}});
    } else {
      out.push_back({Segment::literal, tmpl.substr(open, close - open + 1)});
    }
    pos = close + 1;
  }
  return out;
}

bool literal_at(std::string_view text, std::size_t pos, std::string_view lit, bool sentence_start) {
  if (text.size() - pos < lit.size()) return false;
  for (std::size_t i = 0; i < lit.size(); ++i) {
    const char a = text[pos + i];
    const char b = lit[i];
    if (a == b) continue;
    if (sentence_start && pos + i == 0 && std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b)))
      continue;
    return false;
  }
  return true;
}

class NleParser {
 public:
  NleParser(std::string_view text, const TemplateSet& t) : text_(text), t_(t) {
    kinds_ = {{ClauseKind::contradiction_same, segments(t.contradiction_same)},
              {ClauseKind::contradiction_cross, segments(t.contradiction_cross)},
              {ClauseKind::entailment_same, segments(t.entailment_same)},
              {ClauseKind::entailment_cross, segments(t.entailment_cross)},
              {ClauseKind::neutral, segments(t.neutral)}};
  }

  // Spans that swallow the joiner can hide whole clauses, so first look for
  // a parse whose spans avoid it.
  std::optional<std::vector<ParsedClause>> run() {
    for (bool strict : {true, false}) {
      strict_ = strict;
      std::vector<ParsedClause> clauses;
      if (clause_list(0, clauses)) return clauses;
    }
    return std::nullopt;
  }

 private:
  // Parses clauses from `pos` to the final full stop.
  bool clause_list(std::size_t pos, std::vector<ParsedClause>& clauses) {
    for (const auto& [kind, segs] : kinds_) {
      ParsedClause clause{kind, std::nullopt, std::nullopt, {}, {}};
      auto tail = [&](std::size_t end) {
        clauses.push_back(clause);
        if (end + 1 == text_.size() && text_[end] == '.') return true;
        if (literal_at(text_, end, t_.joiner, false) && clause_list(end + t_.joiner.size(), clauses)) return true;
        clauses.pop_back();
        return false;
      };
      if (match(segs, 0, pos, clause, tail)) return true;
    }
    return false;
  }

  bool match(const std::vector<Segment>& segs, std::size_t i, std::size_t pos, ParsedClause& clause,
             const std::function<bool(std::size_t)>& tail) {
    if (i == segs.size()) return tail(pos);
    const auto& seg = segs[i];
    switch (seg.kind) {
      case Segment::literal:
        return literal_at(text_, pos, seg.text, true) && match(segs, i + 1, pos + seg.text.size(), clause, tail);
      case Segment::slot_k:
      case Segment::slot_l:
        for (auto s : kAllSlots) {
          const auto& name = t_.slot_name(s);
          if (!literal_at(text_, pos, name, true)) continue;
          (seg.kind == Segment::slot_k ? clause.slot_k : clause.slot_l) = s;
          if (match(segs, i + 1, pos + name.size(), clause, tail)) return true;
        }
        return false;
      case Segment::x1:
      case Segment::x2:
        for (std::size_t end = pos + 1; end <= text_.size(); ++end) {
          if (strict_ && text_.substr(pos, end - pos).find(t_.joiner) != std::string_view::npos) break;
          (seg.kind == Segment::x1 ? clause.x1 : clause.x2) = std::string(text_.substr(pos, end - pos));
          if (match(segs, i + 1, end, clause, tail)) return true;
        }
        return false;
    }
    return false;
  }

  std::string_view text_;
  const TemplateSet& t_;
  bool strict_ = true;
  std::vector<std::pair<ClauseKind, std::vector<Segment>>> kinds_;
};

}  // namespace

std::optional<std::vector<ParsedClause>> parse_nle(std::string_view text, const TemplateSet& templates) {
  if (text.empty()) return std::nullopt;
  return NleParser(text, templates).run();
}

}  // namespace ssm::nle
