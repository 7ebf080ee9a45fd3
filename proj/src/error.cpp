#include "filmset/error.hpp"

namespace filmset {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::DuplicateAttribute: return "DuplicateAttribute";
  case ErrorCode::MalformedAttribute: return "MalformedAttribute";
  case ErrorCode::NonPositiveScale: return "NonPositiveScale";
  case ErrorCode::InvalidArgument: return "InvalidArgument";
  case ErrorCode::UnplaceableRoom: return "UnplaceableRoom";
  case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
  case ErrorCode::ArcOnInternalEdge: return "ArcOnInternalEdge";
  case ErrorCode::OpenLoop: return "OpenLoop";
  case ErrorCode::SelfIntersection: return "SelfIntersection";
  case ErrorCode::ThicknessOutOfRange: return "ThicknessOutOfRange";
  case ErrorCode::EmptyCatalogCategory: return "EmptyCatalogCategory";
  case ErrorCode::AmbiguousPattern: return "AmbiguousPattern";
  case ErrorCode::UnknownAttribute: return "UnknownAttribute";
  case ErrorCode::OpeningTooLarge: return "OpeningTooLarge";
  case ErrorCode::OverlapWithExistingOpening: return "OverlapWithExistingOpening";
  case ErrorCode::OpeningOnArc: return "OpeningOnArc";
  case ErrorCode::DegenerateAsset: return "DegenerateAsset";
  case ErrorCode::PartitionOnPerimeter: return "PartitionOnPerimeter";
  case ErrorCode::ObjectLargerThanRegion: return "ObjectLargerThanRegion";
  case ErrorCode::UnknownAnchor: return "UnknownAnchor";
  case ErrorCode::ResultOutsideRegion: return "ResultOutsideRegion";
  case ErrorCode::Unresolvable: return "Unresolvable";
  case ErrorCode::WallFullyOccupied: return "WallFullyOccupied";
  case ErrorCode::EmptyText: return "EmptyText";
  case ErrorCode::BackendUnavailable: return "BackendUnavailable";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::EmptyCategory: return "EmptyCategory";
  case ErrorCode::CatalogFormat: return "CatalogFormat";
  case ErrorCode::IllegalTransition: return "IllegalTransition";
  case ErrorCode::AdjacencyExhausted: return "AdjacencyExhausted";
  case ErrorCode::NoJsonBlock: return "NoJsonBlock";
  case ErrorCode::MultipleJsonBlocks: return "MultipleJsonBlocks";
  case ErrorCode::SchemaViolation: return "SchemaViolation";
  case ErrorCode::MissingFixture: return "MissingFixture";
  case ErrorCode::ConfigError: return "ConfigError";
  case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& message,
                           const std::string& path, const std::string& context) {
  std::string out;
  if (!context.empty()) {
    out += "[" + context + "] ";
  }
  out += std::string(to_string(code));
  if (!path.empty()) {
    out += " at " + path;
  }
  if (!message.empty()) {
    out += ": " + message;
  }
  return out;
}

} // namespace

Error::Error(ErrorCode code, std::string message, std::string path)
    : std::runtime_error(format_message(code, message, path, {})), code_(code),
      path_(std::move(path)), detail_(std::move(message)) {}

Error Error::with_context(std::string context) const {
  Error copy(code_, detail_, path_);
  copy.context_ = std::move(context);
  static_cast<std::runtime_error&>(copy) =
      std::runtime_error(format_message(code_, detail_, path_, copy.context_));
  return copy;
}

} // namespace filmset
