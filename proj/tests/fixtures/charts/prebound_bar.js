// already carries the data attribute, so the rewrite must leave it alone
const xScale = d3.scaleBand().domain(data.map(d => d.Day_of_week)).range([0, vw]).padding(0.2);
const yScale = d3.scaleLinear().domain([0, d3.max(data, d => d.Usage_kWh)]).range([vh, 0]);
svg.selectAll("rect")
  .data(data)
  .enter()
  .append("rect")
  .attr("data", d => JSON.stringify(d))
  .attr("x", d => xScale(d.Day_of_week))
  .attr("y", d => yScale(d.Usage_kWh))
  .attr("width", xScale.bandwidth())
  .attr("height", d => vh - yScale(d.Usage_kWh));
return { xScale, yScale };
