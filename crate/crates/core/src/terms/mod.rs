//! Ranked alphabets, trees, special trees, contexts, convolution and term syntax.

mod alphabet;
mod open;
mod text;
mod tree;

pub use alphabet::{
    is_symbol_name, ConvolutionAlphabet, Pair, RankedAlphabet, Side, Signature, Sym,
};
pub use open::{close, hole, holes, splice, to_closed, Context, Open, OpenTree, SpecialTree, HOLE};
pub use text::{
    parse_open_term, parse_pair_term, parse_raw, parse_term, print_open_term, print_term,
    print_with, resolve_pair, RawTerm,
};
pub use tree::{
    check_tree, convolution, convolve_bot, max_path_len_along, project, translate_tree, Address,
    Tree,
};

pub(crate) use text::{join_names, Cursor};
