#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace filmset {

enum class ErrorCode {
  // core model
  DuplicateAttribute,
  MalformedAttribute,
  NonPositiveScale,
  InvalidArgument,
  // floorplan
  UnplaceableRoom,
  DisconnectedGraph,
  ArcOnInternalEdge,
  OpenLoop,
  SelfIntersection,
  ThicknessOutOfRange,
  // materials
  EmptyCatalogCategory,
  AmbiguousPattern,
  UnknownAttribute,
  // openings
  OpeningTooLarge,
  OverlapWithExistingOpening,
  OpeningOnArc,
  DegenerateAsset,
  PartitionOnPerimeter,
  // layout
  ObjectLargerThanRegion,
  UnknownAnchor,
  ResultOutsideRegion,
  Unresolvable,
  WallFullyOccupied,
  // retrieval
  EmptyText,
  BackendUnavailable,
  DimensionMismatch,
  EmptyCategory,
  CatalogFormat,
  // agent chain
  IllegalTransition,
  AdjacencyExhausted,
  NoJsonBlock,
  MultipleJsonBlocks,
  SchemaViolation,
  MissingFixture,
  // pipeline
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure in the library surfaces as an Error carrying a code.
///
/// `path()` names the offending parameter (e.g. `rooms[0].width`) when one
/// exists, and `context()` names the agent role or pipeline stage that raised
/// it once the error has crossed that boundary.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message, std::string path = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }
  const std::string& context() const noexcept { return context_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Copy of this error annotated with a role or stage name.
  Error with_context(std::string context) const;

private:
  ErrorCode code_;
  std::string path_;
  std::string context_;
  std::string detail_;
};

} // namespace filmset
