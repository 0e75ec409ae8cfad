use std::io::{Read, Write};

use crate::io::{fmt17, read_grid, write_grid, write_pgm, GridData, GridHeader};
use crate::{Error, Result};

/// Cell-centred grid on `[0,1) x [-1/2, 1/2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TorusGrid {
    pub nq: usize,
    pub np: usize,
}

impl TorusGrid {
    pub fn new(nq: usize, np: usize) -> Result<Self> {
        if nq == 0 || np == 0 {
            return Err(Error::InvalidParameter(format!("grid must be non-empty, got {nq}x{np}")));
        }
        Ok(Self { nq, np })
    }

    pub fn len(&self) -> usize {
        self.nq * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dq(&self) -> f64 {
        1.0 / self.nq as f64
    }

    pub fn dp(&self) -> f64 {
        1.0 / self.np as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dq() * self.dp()
    }

    pub fn q(&self, iq: usize) -> f64 {
        (iq as f64 + 0.5) / self.nq as f64
    }

    pub fn p(&self, ip: usize) -> f64 {
        -0.5 + (ip as f64 + 0.5) / self.np as f64
    }

    /// Flat index of cell `(iq, ip)`.
    pub fn index(&self, iq: usize, ip: usize) -> usize {
        iq * self.np + ip
    }

    pub fn center(&self, cell: usize) -> (f64, f64) {
        (self.q(cell / self.np), self.p(cell % self.np))
    }
}

/// Real values on a [`TorusGrid`], stored with `p` running fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: TorusGrid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(grid: TorusGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: TorusGrid, value: f64) -> Self {
        Self { grid, values: vec![value; grid.len()] }
    }

    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for iq in 0..grid.nq {
            for ip in 0..grid.np {
                values.push(f(grid.q(iq), grid.p(ip)));
            }
        }
        Self { grid, values }
    }

    pub fn at(&self, iq: usize, ip: usize) -> f64 {
        self.values[self.grid.index(iq, ip)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Midpoint-rule integral over the torus.
    pub fn integral(&self) -> f64 {
        self.sum() * self.grid.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Sums blocks of `factor x factor` cells. Both resolutions must be
    /// divisible by `factor`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        let g = self.grid;
        if factor == 0 || g.nq % factor != 0 || g.np % factor != 0 {
            return Err(Error::InvalidParameter(format!(
                "cannot coarsen a {}x{} grid by {factor}",
                g.nq, g.np
            )));
        }
        let cg = TorusGrid::new(g.nq / factor, g.np / factor)?;
        let mut values = vec![0.0; cg.len()];
        for iq in 0..g.nq {
            for ip in 0..g.np {
                values[cg.index(iq / factor, ip / factor)] += self.at(iq, ip);
            }
        }
        Ok(Self { grid: cg, values })
    }

    /// `q,p,value` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "q,p,value")?;
        for iq in 0..self.grid.nq {
            for ip in 0..self.grid.np {
                writeln!(w, "{},{},{}", fmt17(self.grid.q(iq)), fmt17(self.grid.p(ip)), fmt17(self.at(iq, ip)))?;
            }
        }
        Ok(())
    }

    /// Binary grid file with `rows = nq`, `cols = np`; `meta` is appended to
    /// the header.
    pub fn save<W: Write>(&self, w: W, meta: &[(String, String)]) -> Result<()> {
        let mut header = GridHeader::new(self.grid.nq, self.grid.np);
        header.push("kind", "field");
        for (k, v) in meta {
            header.push(k, v);
        }
        write_grid(w, &header, &GridData::Real(self.values.clone()))
    }

    pub fn load<R: Read>(r: R) -> Result<(Self, GridHeader)> {
        let (header, data) = read_grid(r)?;
        let GridData::Real(values) = data else {
            return Err(Error::Format("field file must hold real data".into()));
        };
        let grid = TorusGrid::new(header.rows, header.cols).map_err(|e| Error::Format(e.to_string()))?;
        Ok((Self { grid, values }, header))
    }

    /// Greyscale raster, `q` to the right and `p` upwards, scaled between the
    /// field's minimum and maximum.
    pub fn write_pgm<W: Write>(&self, w: W) -> Result<()> {
        let g = self.grid;
        let mut img = Vec::with_capacity(g.len());
        for row in 0..g.np {
            let ip = g.np - 1 - row;
            for iq in 0..g.nq {
                img.push(self.at(iq, ip));
            }
        }
        write_pgm(w, g.nq, g.np, &img, self.min(), self.max())
    }
}
