use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid tile parameters: {0}")]
    InvalidTile(String),
    #[error("tile family {0} has no length parameter")]
    NotParametric(String),
    #[error("empty tile set")]
    EmptyTileSet,
    #[error("booth level {0} outside [3, 6]")]
    BoothLevel(u32),
    #[error("invalid board: {0}")]
    InvalidBoard(String),
    #[error("tile set cannot cover the board")]
    Infeasible,
    #[error("search limit reached before any feasible tiling was found")]
    Timeout,
    #[error("coverage violation at cell ({x}, {y}): covered {count} times")]
    Coverage { x: u32, y: u32, count: u32 },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dsp budget exceeded: {used} used, {budget} allowed")]
    Budget { used: u32, budget: u32 },
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("port width mismatch on `{port}`: {msg}")]
    Width { port: String, msg: String },
    #[error("invalid compressor: {0}")]
    Compressor(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
