// zoomed range: close price on the left axis, volume bars on the right axis
const margin = { top: 20, right: 60, bottom: 30, left: 50 };
const from = new Date("2021-11-01"), to = new Date("2022-06-30");
const rows = data.filter(d => { const t = new Date(d.Date); return t >= from && t <= to; });

const xScale = d3.scaleTime().domain([from, to]).range([margin.left, vw - margin.right]);
const yScale = d3.scaleLinear().domain([0, d3.max(rows, d => d.Close)]).nice().range([vh - margin.bottom, margin.top]);
const volumeScale = d3.scaleLinear().domain([0, d3.max(rows, d => d.Volume)]).nice().range([vh - margin.bottom, margin.top]);
const barWidth = Math.max(1, (vw - margin.left - margin.right) / rows.length - 1);

svg.selectAll("rect.volume")
  .data(rows)
  .enter()
  .append("rect")
  .attr("class", "volume")
  .attr("x", d => xScale(new Date(d.Date)) - barWidth / 2)
  .attr("width", barWidth)
  .attr("y", d => volumeScale(d.Volume))
  .attr("height", d => volumeScale(0) - volumeScale(d.Volume))
  .attr("fill", "#bbb");

svg.append("path").datum(rows).attr("fill", "none").attr("stroke", "#d62728")
  .attr("d", d3.line().x(d => xScale(new Date(d.Date))).y(d => yScale(d.Close)));

svg.selectAll("circle.close")
  .data(rows)
  .enter()
  .append("circle")
  .attr("class", "close")
  .attr("cx", d => xScale(new Date(d.Date)))
  .attr("cy", d => yScale(d.Close))
  .attr("r", 2)
  .attr("fill", "#d62728");

svg.append("g").attr("transform", `translate(0,${vh - margin.bottom})`).call(d3.axisBottom(xScale));
svg.append("g").attr("transform", `translate(${margin.left},0)`).call(d3.axisLeft(yScale));
svg.append("g").attr("transform", `translate(${vw - margin.right},0)`).call(d3.axisRight(volumeScale));
return { xScale, yScale };
