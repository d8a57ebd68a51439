//! The analyze, retain, bind and emit steps composed with no extra state.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::analyzer::UsageReport;
use crate::binding::{
    build_binding_model, widen_for_substitutions, BindingError, BindingModel, BindingOptions,
};
use crate::emit::{render, EmitError, GeneratedArtifact, TemplateSet};
use crate::model::{ComponentId, SchemaSet};
use crate::simplify::{compute_retained_set, SimplifyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Simplify(#[from] SimplifyError),
    #[error(transparent)]
    Binding(#[from] BindingError),
    #[error(transparent)]
    Emit(#[from] EmitError),
}

/// The component set a binding model is built over. Without substitution
/// bounding this adds every schema-possible substitute of what is retained.
pub fn binding_components(
    schema: &SchemaSet,
    usage: &UsageReport,
    options: &BindingOptions,
) -> Result<BTreeSet<ComponentId>, SimplifyError> {
    let retained = compute_retained_set(schema, usage)?;
    Ok(if options.effective().bound_substitutions {
        retained
    } else {
        widen_for_substitutions(schema, &retained)
    })
}

pub fn bind(
    schema: &SchemaSet,
    usage: &UsageReport,
    options: &BindingOptions,
    name: &str,
) -> Result<BindingModel, PipelineError> {
    let components = binding_components(schema, usage, options)?;
    Ok(build_binding_model(schema, &components, usage, options)?.with_name(name))
}

pub fn generate(
    schema: &SchemaSet,
    usage: &UsageReport,
    options: &BindingOptions,
    name: &str,
    templates: &TemplateSet,
) -> Result<(BindingModel, Vec<GeneratedArtifact>), PipelineError> {
    let model = bind(schema, usage, options, name)?;
    let artifacts = render(&model, templates)?;
    Ok((model, artifacts))
}
