#include "ssm/subphrase.hpp"

#include <algorithm>

#include "ssm/util.hpp"

namespace ssm::corpus {

std::set<std::string> load_word_list(const std::filesystem::path& path) {
  std::set<std::string> out;
  for (const auto& raw : read_lines(path)) {
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    out.insert(to_lower(line));
  }
  return out;
}

Lexicons Lexicons::load(const std::filesystem::path& dir) {
  Lexicons lex;
  lex.locations = load_word_list(dir / "locations.txt");
  lex.clothing = load_word_list(dir / "clothing.txt");
  lex.locative_markers = load_word_list(dir / "locative_prepositions.txt");
  return lex;
}

Lexicons Lexicons::bundled() { return load(std::filesystem::path(SSM_DATA_DIR) / "lexicons"); }

namespace {

const std::set<std::string> kSubjectRels = {"nsubj", "nsubj:pass", "nsubjpass"};
const std::set<std::string> kObjectRels = {"obj", "dobj"};
const std::set<std::string> kNominalTags = {"NOUN", "PROPN", "PRON", "NUM"};
const std::set<std::string> kVerbalTags = {"VERB", "AUX"};
// dependents that stay inside a noun phrase span
const std::set<std::string> kPhraseInternalRels = {"det",  "det:poss", "det:predet", "predet", "amod",
                                                   "compound", "compound:prt", "nummod", "poss",
                                                   "nmod:poss", "flat", "fixed", "nn", "quantmod"};

std::string base_rel(const std::string& deprel) { return deprel.substr(0, deprel.find(':')); }

class Extractor {
 public:
  Extractor(const ParsedSentence& s, const Lexicons& lex) : s_(s), lex_(lex) {}

  Extraction run() {
    const std::size_t root = s_.root();
    const auto& r = s_.tokens[root];

    std::optional<std::size_t> verb;
    std::optional<std::size_t> fragment_subject;
    std::size_t predicate = root;
    if (kVerbalTags.count(r.upos)) {
      verb = root;
    } else if (auto cop = child_with(root, {"cop"})) {
      verb = *cop;
    } else if (kNominalTags.count(r.upos)) {
      // "A man exercising." -- the participle hangs off the noun
      std::vector<std::size_t> acl;
      for (auto c : s_.children(root)) {
        if (base_rel(s_.tokens[c].deprel) == "acl" && s_.tokens[c].upos == "VERB") acl.push_back(c);
      }
      if (acl.size() > 1) return Inadmissible{"multiple verbs"};
      if (acl.size() == 1) {
        verb = acl.front();
        predicate = acl.front();
        fragment_subject = root;
      }
    }
    if (!verb) return Inadmissible{"no verb"};

    for (auto head : {predicate, *verb}) {
      for (auto c : s_.children(head)) {
        const auto& t = s_.tokens[c];
        if (t.deprel == "conj" && kVerbalTags.count(t.upos)) return Inadmissible{"multiple verbs"};
      }
    }

    std::vector<std::size_t> subjects;
    if (fragment_subject) {
      subjects.push_back(*fragment_subject);
    } else {
      subjects = children_with(predicate, kSubjectRels);
      if (*verb != predicate) {
        for (auto c : children_with(*verb, kSubjectRels)) subjects.push_back(c);
      }
    }
    if (subjects.empty()) return Inadmissible{"no subject"};
    if (subjects.size() > 1 || has_nominal_conj(subjects.front())) return Inadmissible{"multiple subjects"};

    std::vector<std::size_t> objects;
    if (*verb == predicate) objects = children_with(*verb, kObjectRels);
    if (objects.size() > 1 || (objects.size() == 1 && has_nominal_conj(objects.front()))) {
      return Inadmissible{"multiple objects"};
    }

    const std::size_t subject = subjects.front();
    std::set<std::size_t> reserved{subject, *verb};
    if (!objects.empty()) reserved.insert(objects.front());

    std::vector<std::size_t> locations;
    std::vector<std::size_t> clothing;
    for (std::size_t i = 0; i < s_.tokens.size(); ++i) {
      if (reserved.count(i) || !kNominalTags.count(s_.tokens[i].upos)) continue;
      const auto& t = s_.tokens[i];
      const std::string lemma = to_lower(t.lemma);
      const std::string form = to_lower(t.form);
      const bool in_clothing = lex_.clothing.count(lemma) || lex_.clothing.count(form);
      const auto marker = prepositional_marker(i);
      const bool attached = marker.has_value() || (i != root && kObjectRels.count(t.deprel));
      if (in_clothing && attached) {
        clothing.push_back(i);
      } else if (marker && (lex_.locations.count(lemma) || lex_.locations.count(form) ||
                            lex_.locative_markers.count(*marker))) {
        locations.push_back(i);
      }
    }
    drop_nested(locations, clothing);
    drop_nested(clothing, locations);

    SubphraseSet out;
    out[Slot::subject] = phrase({subject});
    {
      const auto& v = s_.tokens[*verb];
      out[Slot::verb] = SlotPhrase{v.form, {WordToken{to_lower(v.form), to_lower(v.lemma)}}};
    }
    if (!objects.empty()) out[Slot::object] = phrase({objects.front()});
    if (!locations.empty()) out[Slot::location] = phrase(locations);
    if (!clothing.empty()) out[Slot::clothing] = phrase(clothing);
    return out;
  }

 private:
  std::optional<std::size_t> child_with(std::size_t head, const std::set<std::string>& rels) const {
    for (auto c : s_.children(head)) {
      if (rels.count(s_.tokens[c].deprel)) return c;
    }
    return std::nullopt;
  }

  std::vector<std::size_t> children_with(std::size_t head, const std::set<std::string>& rels) const {
    std::vector<std::size_t> out;
    for (auto c : s_.children(head)) {
      if (rels.count(s_.tokens[c].deprel)) out.push_back(c);
    }
    return out;
  }

  bool has_nominal_conj(std::size_t head) const {
    for (auto c : s_.children(head)) {
      const auto& t = s_.tokens[c];
      if (t.deprel == "conj" && kNominalTags.count(t.upos)) return true;
    }
    return false;
  }

  /// Lowercased preposition introducing nominal `i`, for both UD
  /// (obl/nmod with a `case` child) and spaCy (prep -> pobj) trees.
  std::optional<std::string> prepositional_marker(std::size_t i) const {
    const auto& t = s_.tokens[i];
    const auto rel = base_rel(t.deprel);
    if (rel == "obl" || rel == "nmod" || t.head == 0) {
      if (t.deprel == "nmod:poss") return std::nullopt;
      if (auto c = child_with(i, {"case"})) return to_lower(s_.tokens[*c].lemma);
    }
    if (t.deprel == "pobj" && t.head > 0) {
      const auto& prep = s_.tokens[static_cast<std::size_t>(t.head - 1)];
      if (prep.deprel == "prep") return to_lower(prep.lemma);
    }
    return std::nullopt;
  }

  bool inside(std::size_t node, std::size_t ancestor) const {
    for (int cur = s_.tokens[node].head; cur != 0; cur = s_.tokens[static_cast<std::size_t>(cur - 1)].head) {
      if (static_cast<std::size_t>(cur - 1) == ancestor) return true;
    }
    return false;
  }

  // Remove candidates in `a` that sit inside a span headed by a member of a or b.
  void drop_nested(std::vector<std::size_t>& a, const std::vector<std::size_t>& b) const {
    std::vector<std::size_t> kept;
    for (auto x : a) {
      bool nested = false;
      for (auto y : a) nested = nested || (y != x && inside(x, y));
      for (auto y : b) nested = nested || inside(x, y);
      if (!nested) kept.push_back(x);
    }
    a = std::move(kept);
  }

  void collect_phrase(std::size_t head, std::vector<std::size_t>& out) const {
    out.push_back(head);
    for (auto c : s_.children(head)) {
      if (kPhraseInternalRels.count(s_.tokens[c].deprel)) collect_phrase(c, out);
    }
  }

  SlotPhrase phrase(const std::vector<std::size_t>& heads) const {
    SlotPhrase out;
    for (auto head : heads) {
      std::vector<std::size_t> idx;
      collect_phrase(head, idx);
      std::sort(idx.begin(), idx.end());
      std::string text;
      for (auto i : idx) {
        const auto& t = s_.tokens[i];
        if (!text.empty()) text += ' ';
        // undo sentence-initial capitalisation so the span reads well mid-sentence
        text += i == 0 && t.upos != "PROPN" ? to_lower(t.form) : t.form;
        out.tokens.push_back(WordToken{to_lower(t.form), to_lower(t.lemma)});
      }
      if (!out.text.empty()) out.text += " and ";
      out.text += text;
    }
    return out;
  }

  const ParsedSentence& s_;
  const Lexicons& lex_;
};

}  // namespace

Extraction extract_subphrases(const ParsedSentence& sentence, const Lexicons& lexicons) {
  return Extractor(sentence, lexicons).run();
}

}  // namespace ssm::corpus
