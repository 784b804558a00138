#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bipan/model.hpp"

namespace bipan {

/// A product read from CAEX. Label and kind stay empty unless the file states
/// them, so that merging only conflicts on information actually present.
struct FragmentProduct {
  NodeId id;
  std::optional<std::string> label;
  std::optional<ProductKind> kind;
  std::optional<Position> position;
  std::map<std::string, std::string> attributes;

  friend bool operator==(const FragmentProduct&, const FragmentProduct&) = default;
};

/// Products-only view of an AutomationML system unit class library.
struct AmlFragment {
  std::vector<FragmentProduct> products;

  const FragmentProduct* find(const NodeId& id) const;
};

/// Reads the supported CAEX subset (2.x and 3.x):
///
///   CAEXFile/SystemUnitClassLib/SystemUnitClass/InternalElement
///
/// Each InternalElement becomes a product (ID -> id, Name -> label). Elements
/// nested deeper are flattened and get a `parent` attribute naming the
/// enclosing element. `Attribute Name="Position"` with numeric sub-attributes
/// x, y, z gives the position in meters; `Attribute Name="BiPanKind"` sets the
/// product kind; any other Attribute becomes a string attribute (nested
/// sub-attributes as `Outer.Inner`). Everything else in the file is ignored.
///
/// Errors: xml-parse-error (with line or element path), unsupported-root,
/// duplicate-id, non-numeric-position.
AmlFragment import_aml(std::string_view bytes);

/// Enriches `model` with the fragment: matching products receive position
/// and attributes, unknown ids are added as new products (label defaults to
/// the id, kind to Elementary). Flows, processes and skills are untouched.
///
/// Errors: kind-conflict, label-conflict (listing every offending id),
/// duplicate-id when a fragment id names a process or skill.
BiPanModel merge(const AmlFragment& fragment, const BiPanModel& model);

}  // namespace bipan
