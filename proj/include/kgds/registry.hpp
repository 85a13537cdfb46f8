#pragma once

// Bundled configuration tables: semantic type registry, semantic group map,
// entity type whitelist, relation canonicalization map and mention stoplist.
// The same tables ship as editable TSV files under data/; the loaders below
// read those files and the built-in copies serve as defaults.

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "kgds/common.hpp"

namespace kgds {

struct SemanticTypeInfo {
  std::string_view tui;
  std::string_view group;
  std::string_view name;
};

namespace detail {

inline constexpr std::array<SemanticTypeInfo, 127> kSemanticTypes{{
    {"T052", "ACTI", "Activity"},
    {"T053", "ACTI", "Behavior"},
    {"T056", "ACTI", "Daily or Recreational Activity"},
    {"T051", "ACTI", "Event"},
    {"T064", "ACTI", "Governmental or Regulatory Activity"},
    {"T055", "ACTI", "Individual Behavior"},
    {"T066", "ACTI", "Machine Activity"},
    {"T057", "ACTI", "Occupational Activity"},
    {"T054", "ACTI", "Social Behavior"},
    {"T017", "ANAT", "Anatomical Structure"},
    {"T029", "ANAT", "Body Location or Region"},
    {"T023", "ANAT", "Body Part, Organ, or Organ Component"},
    {"T030", "ANAT", "Body Space or Junction"},
    {"T031", "ANAT", "Body Substance"},
    {"T022", "ANAT", "Body System"},
    {"T025", "ANAT", "Cell"},
    {"T026", "ANAT", "Cell Component"},
    {"T018", "ANAT", "Embryonic Structure"},
    {"T021", "ANAT", "Fully Formed Anatomical Structure"},
    {"T024", "ANAT", "Tissue"},
    {"T116", "CHEM", "Amino Acid, Peptide, or Protein"},
    {"T195", "CHEM", "Antibiotic"},
    {"T123", "CHEM", "Biologically Active Substance"},
    {"T122", "CHEM", "Biomedical or Dental Material"},
    {"T103", "CHEM", "Chemical"},
    {"T120", "CHEM", "Chemical Viewed Functionally"},
    {"T104", "CHEM", "Chemical Viewed Structurally"},
    {"T200", "CHEM", "Clinical Drug"},
    {"T196", "CHEM", "Element, Ion, or Isotope"},
    {"T126", "CHEM", "Enzyme"},
    {"T131", "CHEM", "Hazardous or Poisonous Substance"},
    {"T125", "CHEM", "Hormone"},
    {"T129", "CHEM", "Immunologic Factor"},
    {"T130", "CHEM", "Indicator, Reagent, or Diagnostic Aid"},
    {"T197", "CHEM", "Inorganic Chemical"},
    {"T114", "CHEM", "Nucleic Acid, Nucleoside, or Nucleotide"},
    {"T109", "CHEM", "Organic Chemical"},
    {"T121", "CHEM", "Pharmacologic Substance"},
    {"T192", "CHEM", "Receptor"},
    {"T127", "CHEM", "Vitamin"},
    {"T185", "CONC", "Classification"},
    {"T077", "CONC", "Conceptual Entity"},
    {"T169", "CONC", "Functional Concept"},
    {"T102", "CONC", "Group Attribute"},
    {"T078", "CONC", "Idea or Concept"},
    {"T170", "CONC", "Intellectual Product"},
    {"T171", "CONC", "Language"},
    {"T080", "CONC", "Qualitative Concept"},
    {"T081", "CONC", "Quantitative Concept"},
    {"T089", "CONC", "Regulation or Law"},
    {"T082", "CONC", "Spatial Concept"},
    {"T079", "CONC", "Temporal Concept"},
    {"T203", "DEVI", "Drug Delivery Device"},
    {"T074", "DEVI", "Medical Device"},
    {"T075", "DEVI", "Research Device"},
    {"T020", "DISO", "Acquired Abnormality"},
    {"T190", "DISO", "Anatomical Abnormality"},
    {"T049", "DISO", "Cell or Molecular Dysfunction"},
    {"T019", "DISO", "Congenital Abnormality"},
    {"T047", "DISO", "Disease or Syndrome"},
    {"T050", "DISO", "Experimental Model of Disease"},
    {"T033", "DISO", "Finding"},
    {"T037", "DISO", "Injury or Poisoning"},
    {"T048", "DISO", "Mental or Behavioral Dysfunction"},
    {"T191", "DISO", "Neoplastic Process"},
    {"T046", "DISO", "Pathologic Function"},
    {"T184", "DISO", "Sign or Symptom"},
    {"T087", "GENE", "Amino Acid Sequence"},
    {"T088", "GENE", "Carbohydrate Sequence"},
    {"T028", "GENE", "Gene or Genome"},
    {"T085", "GENE", "Molecular Sequence"},
    {"T086", "GENE", "Nucleotide Sequence"},
    {"T083", "GEOG", "Geographic Area"},
    {"T100", "LIVB", "Age Group"},
    {"T011", "LIVB", "Amphibian"},
    {"T008", "LIVB", "Animal"},
    {"T194", "LIVB", "Archaeon"},
    {"T007", "LIVB", "Bacterium"},
    {"T012", "LIVB", "Bird"},
    {"T204", "LIVB", "Eukaryote"},
    {"T099", "LIVB", "Family Group"},
    {"T013", "LIVB", "Fish"},
    {"T004", "LIVB", "Fungus"},
    {"T096", "LIVB", "Group"},
    {"T016", "LIVB", "Human"},
    {"T015", "LIVB", "Mammal"},
    {"T001", "LIVB", "Organism"},
    {"T101", "LIVB", "Patient or Disabled Group"},
    {"T002", "LIVB", "Plant"},
    {"T098", "LIVB", "Population Group"},
    {"T097", "LIVB", "Professional or Occupational Group"},
    {"T014", "LIVB", "Reptile"},
    {"T010", "LIVB", "Vertebrate"},
    {"T005", "LIVB", "Virus"},
    {"T071", "OBJC", "Entity"},
    {"T168", "OBJC", "Food"},
    {"T073", "OBJC", "Manufactured Object"},
    {"T072", "OBJC", "Physical Object"},
    {"T167", "OBJC", "Substance"},
    {"T091", "OCCU", "Biomedical Occupation or Discipline"},
    {"T090", "OCCU", "Occupation or Discipline"},
    {"T093", "ORGA", "Health Care Related Organization"},
    {"T092", "ORGA", "Organization"},
    {"T094", "ORGA", "Professional Society"},
    {"T095", "ORGA", "Self-help or Relief Organization"},
    {"T038", "PHEN", "Biologic Function"},
    {"T069", "PHEN", "Environmental Effect of Humans"},
    {"T068", "PHEN", "Human-caused Phenomenon or Process"},
    {"T034", "PHEN", "Laboratory or Test Result"},
    {"T070", "PHEN", "Natural Phenomenon or Process"},
    {"T067", "PHEN", "Phenomenon or Process"},
    {"T043", "PHYS", "Cell Function"},
    {"T201", "PHYS", "Clinical Attribute"},
    {"T045", "PHYS", "Genetic Function"},
    {"T041", "PHYS", "Mental Process"},
    {"T044", "PHYS", "Molecular Function"},
    {"T032", "PHYS", "Organism Attribute"},
    {"T040", "PHYS", "Organism Function"},
    {"T042", "PHYS", "Organ or Tissue Function"},
    {"T039", "PHYS", "Physiologic Function"},
    {"T060", "PROC", "Diagnostic Procedure"},
    {"T065", "PROC", "Educational Activity"},
    {"T058", "PROC", "Health Care Activity"},
    {"T059", "PROC", "Laboratory Procedure"},
    {"T063", "PROC", "Molecular Biology Research Technique"},
    {"T062", "PROC", "Research Activity"},
    {"T061", "PROC", "Therapeutic or Preventive Procedure"},
}};

inline constexpr std::array<std::string_view, 51> kWhitelist{{
    "T017", "T029", "T023", "T030", "T031", "T022", "T021", "T024", "T116", "T195",
    "T123", "T103", "T200", "T196", "T126", "T131", "T125", "T129", "T130", "T197",
    "T114", "T109", "T121", "T192", "T127", "T074", "T075", "T020", "T190", "T049",
    "T019", "T047", "T033", "T037", "T048", "T191", "T046", "T184", "T201", "T041",
    "T032", "T040", "T042", "T039", "T060", "T065", "T058", "T059", "T063", "T062",
    "T061",
}};

struct RelationRow {
  std::string_view relation;
  std::string_view inverse;
};

inline constexpr std::array<RelationRow, 21> kCanonicalRelations{{
    {"finding_site_of", "has_finding_site"},
    {"associated_morphology_of", "has_associated_morphology"},
    {"method_of", "has_method"},
    {"interprets", "is_interpreted_by"},
    {"direct_procedure_site_of", "has_direct_procedure_site"},
    {"causative_agent_of", "has_causative_agent"},
    {"active_ingredient_of", "has_active_ingredient"},
    {"interpretation_of", "has_interpretation"},
    {"component_of", "has_component"},
    {"indirect_procedure_site_of", "has_indirect_procedure_site"},
    {"direct_morphology_of", "has_direct_morphology"},
    {"cause_of", "due_to"},
    {"direct_substance_of", "has_direct_substance"},
    {"uses_device", "device_used_by"},
    {"focus_of", "has_focus"},
    {"direct_device_of", "has_direct_device"},
    {"procedure_site_of", "has_procedure_site"},
    {"uses_substance", "substance_used_by"},
    {"associated_finding_of", "has_associated_finding"},
    {"occurs_after", "occurs_before"},
    {"is_modification_of", "has_modification"},
}};

inline constexpr std::array<std::string_view, 4> kExcludedRelations{{
    "same_as", "possibly_equivalent_to", "associated_with", "temporally_related_to",
}};

inline constexpr std::array<std::string_view, 96> kStoplist{{
    "bladder", "heart", "retinal", "lungs", "spinal", "kidneys", "colon", "eyes", "lung",
    "kidney", "intestinal", "liver", "brain", "death", "period", "blood pressure", "head",
    "injection", "prevention", "chemotherapy", "application", "resection", "infusion",
    "treatments", "therapeutic", "surgical treatment", "CT", "surgical",
    "transplantation", "stimulation", "delivery", "intervention", "procedure", "removal",
    "operation", "cancer", "tumor", "tumors", "obesity", "disorder", "disorders",
    "diseases", "stroke", "disease", "infection", "condition", "hypertension", "test",
    "erythrocytes", "cells", "US", "biopsy", "ultrasound", "MRI", "lesion", "interaction",
    "mass", "difficulty", "dependent", "abnormal", "presence", "positive", "negative",
    "severe", "lesions", "insulin", "amino acids", "glucose", "ATP", "protein",
    "proteins", "medication", "drugs", "drug", "strains", "injury", "exposure", "damage",
    "tissue", "bone marrow", "tissues", "male", "temperature", "age", "antibody",
    "antibodies", "investigations", "examination", "assessment", "plasma", "blood",
    "skin", "cardiovascular", "concentrations", "concentration", "abnormalities",
}};

}  // namespace detail

// TUI -> (semantic group, name) for all release semantic types.
class SemanticTypeRegistry {
 public:
  struct Entry {
    std::string group;
    std::string name;
  };

  static SemanticTypeRegistry builtin() {
    SemanticTypeRegistry r;
    for (const auto& s : detail::kSemanticTypes)
      r.entries_.emplace(std::string(s.tui), Entry{std::string(s.group), std::string(s.name)});
    return r;
  }

  // TSV: TUI, group, name.
  static SemanticTypeRegistry load(const std::string& path) {
    SemanticTypeRegistry r;
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (read_line(in, line)) {
      ++lineno;
      if (trim(line).empty() || line[0] == '#') continue;
      const auto cols = split_view(line, '\t');
      if (cols.size() != 3 || !is_tui(cols[0]))
        throw DataError(path + ":" + std::to_string(lineno) + ": expected TUI, group, name");
      r.entries_[std::string(cols[0])] = Entry{std::string(cols[1]), std::string(cols[2])};
    }
    return r;
  }

  bool contains(std::string_view tui) const { return entries_.find(std::string(tui)) != entries_.end(); }

  const Entry* find(std::string_view tui) const {
    auto it = entries_.find(std::string(tui));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::optional<std::string> group_of(std::string_view tui) const {
    if (const Entry* e = find(tui)) return e->group;
    return std::nullopt;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, Entry> entries_;
};

using TuiSet = std::set<std::string>;

inline TuiSet builtin_whitelist() {
  TuiSet out;
  for (auto t : detail::kWhitelist) out.emplace(t);
  return out;
}

// First column of each non-comment line is a TUI.
inline TuiSet load_whitelist(const std::string& path) {
  TuiSet out;
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto tui = split_view(line, '\t').front();
    if (!is_tui(tui)) throw DataError(path + ":" + std::to_string(lineno) + ": not a TUI");
    out.emplace(tui);
  }
  return out;
}

// Relation canonicalization: the kept direction of every relation, the name
// of its inverse, and the relation names dropped outright.
class RelationCanonMap {
 public:
  enum class Kind { kCanonical, kInverse, kExcluded, kUnknown };

  static RelationCanonMap builtin() {
    RelationCanonMap m;
    for (const auto& r : detail::kCanonicalRelations) m.add_canonical(std::string(r.relation), std::string(r.inverse));
    for (auto e : detail::kExcludedRelations) m.excluded_.emplace(e);
    m.validate("builtin");
    return m;
  }

  // TSV rows: "canonical<TAB>name<TAB>inverse" or "exclude<TAB>name".
  static RelationCanonMap load(const std::string& path) {
    RelationCanonMap m;
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (read_line(in, line)) {
      ++lineno;
      if (trim(line).empty() || line[0] == '#') continue;
      const auto cols = split_view(line, '\t');
      const std::string where = path + ":" + std::to_string(lineno);
      if (cols[0] == "canonical" && cols.size() == 3) {
        m.add_canonical(std::string(cols[1]), std::string(cols[2]));
      } else if (cols[0] == "canonical" && cols.size() == 2) {
        m.canonical_.emplace(cols[1]);
      } else if (cols[0] == "exclude" && cols.size() == 2) {
        m.excluded_.emplace(cols[1]);
      } else {
        throw DataError(where + ": expected 'canonical<TAB>name<TAB>inverse' or 'exclude<TAB>name'");
      }
    }
    m.validate(path);
    return m;
  }

  Kind classify(std::string_view rela) const {
    const std::string key(rela);
    if (canonical_.count(key)) return Kind::kCanonical;
    if (inverse_to_canonical_.count(key)) return Kind::kInverse;
    if (excluded_.count(key)) return Kind::kExcluded;
    return Kind::kUnknown;
  }

  // Canonical name for an inverse relation name.
  std::optional<std::string> canonical_of(std::string_view inverse) const {
    auto it = inverse_to_canonical_.find(std::string(inverse));
    if (it == inverse_to_canonical_.end()) return std::nullopt;
    return it->second;
  }

  // Inverse name of either a canonical or an inverse relation.
  std::optional<std::string> inverse_of(std::string_view rela) const {
    const std::string key(rela);
    if (auto it = canonical_to_inverse_.find(key); it != canonical_to_inverse_.end()) return it->second;
    if (auto it = inverse_to_canonical_.find(key); it != inverse_to_canonical_.end()) return it->second;
    return std::nullopt;
  }

  // Rewrites a triple onto the canonical direction; unchanged if the
  // relation is not a known inverse.
  Triple to_canonical(const Triple& t) const {
    if (auto c = canonical_of(t.relation)) return Triple{t.tail, *c, t.head};
    return t;
  }

  const std::set<std::string>& canonical() const { return canonical_; }
  const std::map<std::string, std::string>& inverse_to_canonical() const { return inverse_to_canonical_; }
  const std::set<std::string>& excluded() const { return excluded_; }

 private:
  void add_canonical(std::string rel, std::string inv) {
    canonical_.insert(rel);
    canonical_to_inverse_[rel] = inv;
    inverse_to_canonical_[std::move(inv)] = std::move(rel);
  }

  void validate(const std::string& where) const {
    for (const auto& [inv, can] : inverse_to_canonical_) {
      if (canonical_.count(inv))
        throw DataError(where + ": relation '" + inv + "' is both canonical and an inverse");
      if (excluded_.count(inv) || excluded_.count(can))
        throw DataError(where + ": relation '" + inv + "' is both mapped and excluded");
    }
  }

  std::set<std::string> canonical_;
  std::map<std::string, std::string> canonical_to_inverse_;
  std::map<std::string, std::string> inverse_to_canonical_;
  std::set<std::string> excluded_;
};

// Mention surfaces that are always pruned. Entries are stored normalized
// (lowercase, collapsed whitespace) and matched the same way.
class Stoplist {
 public:
  static Stoplist builtin() {
    Stoplist s;
    for (auto e : detail::kStoplist) s.add(e);
    return s;
  }

  static Stoplist load(const std::string& path) {
    Stoplist s;
    auto in = open_input(path);
    std::string line;
    while (read_line(in, line)) {
      if (trim(line).empty() || line[0] == '#') continue;
      s.add(split_view(line, '\t').front());
    }
    return s;
  }

  void add(std::string_view surface) { surfaces_.insert(normalize_surface(surface)); }
  bool contains(std::string_view surface) const { return surfaces_.count(normalize_surface(surface)) != 0; }
  std::size_t size() const { return surfaces_.size(); }
  bool empty() const { return surfaces_.empty(); }

 private:
  std::set<std::string> surfaces_;
};

}  // namespace kgds
