from .align import (
    AlignedDocument,
    MismatchReport,
    align_annotations,
    boundary_mismatch_report,
    char_to_token_span,
    prepare_document,
)
from .corpus import (
    CharSpan,
    EntityAnnotation,
    RawDocument,
    RelationAnnotation,
    convert_brat,
    document_from_record,
    load_corpus,
    save_corpus,
)
from .latex import latex_to_text, project_span, unproject_span
from .tokenize import HFTokenizer, TokenizedDocument, ToyTokenizer, tokenize_with_offsets

__all__ = [
    "AlignedDocument", "MismatchReport", "align_annotations", "boundary_mismatch_report",
    "char_to_token_span", "prepare_document", "CharSpan", "EntityAnnotation", "RawDocument",
    "RelationAnnotation", "convert_brat", "document_from_record", "load_corpus",
    "save_corpus", "latex_to_text", "project_span", "unproject_span", "HFTokenizer",
    "TokenizedDocument", "ToyTokenizer", "tokenize_with_offsets",
]
